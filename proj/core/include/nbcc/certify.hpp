// Rigorous interval arithmetic and the Krawczyk containment test proving
// existence and uniqueness of an exact zero near a numerical solution.
//
// Rigor mechanism: every elementary operation is computed in round-nearest
// and then widened outward by 4 ulp steps per bound, which encloses the
// exact result (one rounding contributes at most half an ulp). No rounding
// mode switching, so the enclosures hold under any compiler optimization
// level and on any thread.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "nbcc/poly.hpp"

namespace nbcc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double v) : lo(v), hi(v) {}
    Interval(double l, double h) : lo(l), hi(h) {}

    double width() const { return hi - lo; }
    double mag() const;  // max |x| over the interval
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool strictly_contains(const Interval& o) const { return lo < o.lo && o.hi < hi; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval ipow(const Interval& a, int e);

/// The infinity-norm ball [x - r, x + r].
struct IntervalBox {
    std::vector<Interval> components;
    std::vector<double> center;
    double radius = 0.0;

    static IntervalBox around(std::span<const double> center, double radius);
    int size() const { return static_cast<int>(components.size()); }
};

/// Component i encloses { F_i(y) : y in box }. Requires a real system
/// (all coefficients must have zero imaginary part).
std::vector<Interval> interval_eval(const PolySystem& system, const IntervalBox& box);

/// The Krawczyk image
///   K = x - Y F(x) + (I - Y DF([x])) ([x] - x),
/// with Y the floating approximate inverse of DF(x) and every product after
/// that enclosed in interval arithmetic. Throws on a singular center
/// Jacobian.
IntervalBox krawczyk_operator(const PolySystem& system, const IntervalBox& box);

enum class CertifyStatus { kCertifiedUnique, kNotCertified };

struct CertificationResult {
    CertifyStatus status = CertifyStatus::kNotCertified;
    IntervalBox krawczyk_box;
    /// min over components of the distance from K to the boundary of the
    /// input box; negative when K is not contained.
    double containment_margin = 0.0;
    std::string mechanism = "ulp-inflation(4)";
    std::string reason;  // set when not certified
};

/// Krawczyk test at radius r around the real point x: certified_unique iff
/// the Krawczyk image lies in the open box (margin > 0), verified with
/// exact double comparisons against the outward-rounded image.
CertificationResult certify_solution(const PolySystem& system,
                                     std::span<const double> x, double r = 1e-8);

}  // namespace nbcc
