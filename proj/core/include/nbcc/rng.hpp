// Seeded deterministic random streams. mt19937_64 bits are mapped to
// doubles directly so sequences are identical across standard libraries.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace nbcc {

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

    /// uniform on (0,1)
    double unit_double() {
        double u;
        do {
            u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        } while (u <= 0.0);
        return u;
    }

    /// uniform on the unit circle
    std::complex<double> unit_complex() {
        double theta = 2.0 * 3.14159265358979323846 * unit_double();
        return {std::cos(theta), std::sin(theta)};
    }

    std::uint64_t bits() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

}  // namespace nbcc
