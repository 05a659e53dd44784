#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nbcc/acsys.hpp"
#include "nbcc/classify.hpp"
#include "nbcc/fivebody.hpp"
#include "nbcc/rng.hpp"

using namespace nbcc;

TEST_CASE("system shape: equation and variable counts") {
    ACSystem five = build_ac_system(MassVector::equal(5));
    CHECK(five.system.size() == 20);
    CHECK(five.system.nvars() == 20);

    ACSystem four = build_ac_system(MassVector::equal(4));
    CHECK(four.system.size() == 12);
    CHECK(four.system.nvars() == 12);
    CHECK(four.system.total_degree() == 2985984ULL);

    CHECK_THROWS(build_ac_system(MassVector::equal(2)));
    CHECK_THROWS(build_ac_system(MassVector{{1.0, -1.0, 1.0}}));
}

TEST_CASE("degree structure: distance equations cubic, constraints quartic") {
    for (int n : {3, 4, 5}) {
        ACSystem ac = build_ac_system(MassVector::equal(n));
        const int k = n * (n - 1) / 2;
        for (int i = 0; i < k; ++i) CHECK(ac.system.poly(i).degree() == 3);
        for (int i = k; i < 2 * k; ++i) CHECK(ac.system.poly(i).degree() == 4);
    }
}

TEST_CASE("ac_residual: regular simplex gives the zero vector") {
    std::vector<double> ones(10, 1.0);
    auto res = ac_residual(ones, MassVector::equal(5));
    for (double r : res) CHECK(std::abs(r) < 1e-15);
}

TEST_CASE("ac_residual: unequal collinear spacing is not central") {
    std::vector<double> d = {1.0, 1.0, 2.0};
    auto res = ac_residual(d, MassVector::equal(3));
    double norm = 0.0;
    for (double r : res) norm = std::max(norm, std::abs(r));
    CHECK(norm > 1e-2);
}

TEST_CASE("ac_residual: rejects non-positive distances") {
    std::vector<double> d = {1.0, -1.0, 1.0};
    CHECK_THROWS(ac_residual(d, MassVector::equal(3)));
}

TEST_CASE("newton_refine: converges to the equilateral point") {
    std::vector<double> start = {1.01, 0.99, 1.0};
    auto result = newton_refine(start, MassVector::equal(3));
    REQUIRE(result.converged);
    for (double d : result.distances) CHECK(std::abs(d - 1.0) < 1e-14);
}

TEST_CASE("newton_refine: exact root is a fixed point") {
    std::vector<double> start = {1.0, 1.0, 1.0};
    auto result = newton_refine(start, MassVector::equal(3));
    REQUIRE(result.converged);
    CHECK(result.iterations == 0);
    CHECK(result.distances == start);
}

TEST_CASE("newton_refine: pentagon scale matches the bisection oracle") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    // unit-side pentagon distance pattern: sides and diagonals by adjacency
    std::vector<double> base = {1.0, phi, phi, 1.0, 1.0, phi, phi, 1.0, phi, 1.0};
    MassVector masses = MassVector::equal(5);

    auto refined = newton_refine(base, masses);  // overall scale guess 1.0
    REQUIRE(refined.converged);
    // shape is forced: diagonal/side = phi to 1e-12
    double side = refined.distances[0], diag = refined.distances[1];
    CHECK(std::abs(diag / side - phi) < 1e-12);

    // independent 1-D bisection on the scale parameter
    auto residual_at_scale = [&](double s) {
        std::vector<double> d(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) d[i] = s * base[i];
        return ac_residual(d, masses)[0];
    };
    double lo = 0.4, hi = 1.2;
    REQUIRE(residual_at_scale(lo) * residual_at_scale(hi) < 0.0);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (residual_at_scale(lo) * residual_at_scale(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    CHECK(std::abs(side - lo) < 1e-10);
}

TEST_CASE("newton_refine: n=5 class seeds reach 2e-14 and stay in class") {
    MassVector masses = MassVector::equal(5);
    for (const auto& seed : five_body_class_seeds()) {
        auto result = newton_refine(seed.distances, masses, 2e-14, 80);
        REQUIRE_MESSAGE(result.converged, seed.name);
        CHECK(result.residual <= 2e-14);
        double drift = 0.0;
        for (std::size_t i = 0; i < seed.distances.size(); ++i)
            drift = std::max(drift, std::abs(result.distances[i] - seed.distances[i]));
        CHECK(drift < 1e-6);
    }
}

TEST_CASE("consistency: polynomial system matches the direct residual") {
    MassVector masses = MassVector::equal(4);
    ACSystem ac = build_ac_system(masses);
    RandomStream rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> d(6);
        for (double& v : d) v = 0.3 + 1.7 * rng.unit_double();
        auto lifted = ac.lift_distances(d);
        auto poly_vals = ac.system.eval(lifted);
        auto direct = ac_residual(d, masses);
        for (int i = 0; i < 6; ++i) {
            double scale = std::max(1.0, std::abs(direct[i]));
            CHECK(std::abs(poly_vals[i].real() - direct[i]) <= 1e-13 * scale);
            CHECK(poly_vals[i].imag() == 0.0);
        }
        // constraint rows vanish up to rounding of s = r^-3
        for (int i = 6; i < 12; ++i) CHECK(std::abs(poly_vals[i]) < 1e-14);
    }
}

TEST_CASE("symmetry equivariance of the residual under relabeling") {
    MassVector masses = MassVector::equal(4);
    RandomStream rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> d(6);
        for (double& v : d) v = 0.4 + 1.2 * rng.unit_double();
        auto res = ac_residual(d, masses);
        std::vector<int> perm = {2, 0, 3, 1};
        auto dp = permute_distances(d, 4, perm);
        auto resp = ac_residual(dp, masses);
        std::vector<double> a(res.size()), b(res.size());
        for (std::size_t i = 0; i < res.size(); ++i) {
            a[i] = std::abs(res[i]);
            b[i] = std::abs(resp[i]);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a[i] - b[i]) <= 1e-13 * std::max(1.0, a[i]));
    }
}

TEST_CASE("scaling law: the normalization pins the scale") {
    MassVector masses = MassVector::equal(3);
    std::vector<double> root = {1.0, 1.0, 1.0};
    CHECK(std::abs(ac_residual(root, masses)[0]) < 1e-15);
    for (double c : {0.5, 0.9, 1.1, 2.0}) {
        std::vector<double> scaled = {c, c, c};
        auto res = ac_residual(scaled, masses);
        // every term contributes -2 c^2 S with S = c^-3 - 1, three bodies:
        // residual = -6 c^2 (c^-3 - 1) exactly
        double expect = -6.0 * c * c * (1.0 / (c * c * c) - 1.0);
        CHECK(std::abs(res[0] - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
        CHECK(std::abs(res[0]) > 1e-3);
    }
}

TEST_CASE("lift_distances appends exact inverse cubes") {
    ACSystem ac = build_ac_system(MassVector::equal(3));
    std::vector<double> d = {0.7, 1.3, 2.1};
    auto full = ac.lift_distances_real(d);
    REQUIRE(full.size() == 6);
    for (int p = 0; p < 3; ++p) {
        CHECK(full[p] == d[p]);
        CHECK(full[3 + p] == 1.0 / (d[p] * d[p] * d[p]));
    }
    CHECK_THROWS(ac.lift_distances_real(std::vector<double>{1.0}));
}
