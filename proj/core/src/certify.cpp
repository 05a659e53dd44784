#include "nbcc/certify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nbcc {

namespace {

inline double up(double v) {
    for (int i = 0; i < 4; ++i)
        v = std::nextafter(v, std::numeric_limits<double>::infinity());
    return v;
}

inline double down(double v) {
    for (int i = 0; i < 4; ++i)
        v = std::nextafter(v, -std::numeric_limits<double>::infinity());
    return v;
}

}  // namespace

double Interval::mag() const { return std::max(std::abs(lo), std::abs(hi)); }

Interval operator+(const Interval& a, const Interval& b) {
    return {down(a.lo + b.lo), up(a.hi + b.hi)};
}

Interval operator-(const Interval& a, const Interval& b) {
    return {down(a.lo - b.hi), up(a.hi - b.lo)};
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {down(std::min({p1, p2, p3, p4})), up(std::max({p1, p2, p3, p4}))};
}

Interval ipow(const Interval& a, int e) {
    Interval r(1.0);
    for (int i = 0; i < e; ++i) r = r * a;
    return r;
}

IntervalBox IntervalBox::around(std::span<const double> center, double radius) {
    IntervalBox box;
    box.center.assign(center.begin(), center.end());
    box.radius = radius;
    box.components.reserve(center.size());
    for (double c : center) box.components.emplace_back(c - radius, c + radius);
    return box;
}

namespace {

void require_real(const PolySystem& system) {
    for (const auto& poly : system.polys())
        for (const Complex& c : poly.coefficients())
            if (c.imag() != 0.0)
                throw std::invalid_argument(
                    "interval arithmetic: system has complex coefficients");
}

Interval eval_single(const Polynomial& poly,
                     const std::vector<std::vector<Interval>>& powers) {
    Interval sum(0.0);
    for (std::size_t t = 0; t < poly.exponents().size(); ++t) {
        Interval m(poly.coefficients()[t].real());
        const Exponents& e = poly.exponents()[t];
        for (std::size_t j = 0; j < e.size(); ++j)
            if (e[j]) m = m * powers[j][e[j]];
        sum = sum + m;
    }
    return sum;
}

std::vector<std::vector<Interval>> power_table(const PolySystem& system,
                                               const IntervalBox& box) {
    std::vector<std::vector<Interval>> powers(system.nvars());
    for (int j = 0; j < system.nvars(); ++j) {
        int d = system.max_degree(j);
        powers[j].resize(d + 1, Interval(1.0));
        for (int p = 1; p <= d; ++p) powers[j][p] = powers[j][p - 1] * box.components[j];
    }
    return powers;
}

}  // namespace

std::vector<Interval> interval_eval(const PolySystem& system, const IntervalBox& box) {
    require_real(system);
    if (box.size() != system.nvars())
        throw std::invalid_argument("interval_eval: dimension mismatch");
    auto powers = power_table(system, box);
    std::vector<Interval> out;
    out.reserve(system.size());
    for (const auto& poly : system.polys())
        out.push_back(eval_single(poly, powers));
    return out;
}

IntervalBox krawczyk_operator(const PolySystem& system, const IntervalBox& box) {
    require_real(system);
    const int n = system.nvars();
    if (!system.square() || box.size() != n)
        throw std::invalid_argument("krawczyk_operator: need a square system on the box");

    // floating center Jacobian and its approximate inverse Y
    std::vector<Complex> xc(box.center.begin(), box.center.end());
    Eigen::MatrixXcd jc = system.jacobian_eval(xc);
    Eigen::MatrixXd jreal = jc.real();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jreal);
    if (lu.rank() < n)
        throw std::runtime_error("krawczyk_operator: singular center Jacobian");
    Eigen::MatrixXd y = lu.inverse();

    // rigorous F(x) at the degenerate box
    IntervalBox point = IntervalBox::around(box.center, 0.0);
    std::vector<Interval> fx = interval_eval(system, point);

    // interval Jacobian over the box, via the derivative polynomials
    auto powers = power_table(system, box);
    std::vector<std::vector<Interval>> jint(n, std::vector<Interval>(n, Interval(0.0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Polynomial d = system.poly(i).derivative(j);
            Interval sum(0.0);
            for (std::size_t t = 0; t < d.exponents().size(); ++t) {
                Interval m(d.coefficients()[t].real());
                const Exponents& e = d.exponents()[t];
                for (int l = 0; l < n; ++l)
                    if (e[l]) m = m * powers[l][e[l]];
                sum = sum + m;
            }
            jint[i][j] = sum;
        }
    }

    // K = x - Y fx + (I - Y jint)([x] - x)
    IntervalBox out;
    out.center = box.center;
    out.radius = 0.0;
    out.components.resize(n);
    for (int i = 0; i < n; ++i) {
        Interval acc(box.center[i]);
        for (int j = 0; j < n; ++j) acc = acc - Interval(y(i, j)) * fx[j];
        for (int j = 0; j < n; ++j) {
            // row i of (I - Y jint), column j
            Interval m = (i == j) ? Interval(1.0) : Interval(0.0);
            for (int l = 0; l < n; ++l) m = m - Interval(y(i, l)) * jint[l][j];
            acc = acc + m * Interval(-box.radius, box.radius);
        }
        out.components[i] = acc;
    }
    return out;
}

CertificationResult certify_solution(const PolySystem& system,
                                     std::span<const double> x, double r) {
    CertificationResult result;
    IntervalBox box = IntervalBox::around(x, r);
    IntervalBox k;
    try {
        k = krawczyk_operator(system, box);
    } catch (const std::exception& e) {
        result.status = CertifyStatus::kNotCertified;
        result.reason = e.what();
        result.containment_margin = -std::numeric_limits<double>::infinity();
        return result;
    }
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < box.size(); ++i) {
        margin = std::min(margin, k.components[i].lo - box.components[i].lo);
        margin = std::min(margin, box.components[i].hi - k.components[i].hi);
    }
    result.krawczyk_box = k;
    result.containment_margin = margin;
    if (margin > 0.0) {
        result.status = CertifyStatus::kCertifiedUnique;
    } else {
        result.status = CertifyStatus::kNotCertified;
        result.reason = "Krawczyk image not contained in the open box";
    }
    return result;
}

}  // namespace nbcc
