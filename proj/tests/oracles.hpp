// Test-only oracles, independent of the implementation paths they check.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "nbcc/poly.hpp"

namespace nbcc::testing {

// --- finite differences ----------------------------------------------------

/// Central-difference Jacobian of a system at a point, step h per variable.
inline Eigen::MatrixXcd finite_difference_jacobian(const PolySystem& sys,
                                                   std::vector<Complex> x,
                                                   double h = 1e-6) {
    const int n = sys.nvars();
    Eigen::MatrixXcd jac(sys.size(), n);
    for (int j = 0; j < n; ++j) {
        auto xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        auto fp = sys.eval(xp);
        auto fm = sys.eval(xm);
        for (int i = 0; i < sys.size(); ++i)
            jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return jac;
}

// --- univariate machinery for the resultant/companion oracle ---------------

/// Coefficients ascending by degree; trailing zeros trimmed.
using UniPoly = std::vector<Complex>;

inline UniPoly uni_trim(UniPoly p, double tol = 0.0) {
    while (p.size() > 1 && std::abs(p.back()) <= tol) p.pop_back();
    return p;
}

inline std::vector<Complex> uni_roots(const UniPoly& poly) {
    UniPoly p = uni_trim(poly, 1e-13);
    const int deg = static_cast<int>(p.size()) - 1;
    if (deg < 1) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p[i] / p[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    std::vector<Complex> roots;
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
    return roots;
}

/// A bivariate polynomial as a vector of univariate coefficients in x,
/// indexed by the power of y: p(x,y) = sum_j coeff_in_x[j](x) y^j.
using BiPoly = std::vector<UniPoly>;

inline BiPoly bipoly_from(const Polynomial& p) {
    BiPoly out;
    for (std::size_t t = 0; t < p.exponents().size(); ++t) {
        const auto& e = p.exponents()[t];
        int ex = e[0], ey = e[1];
        if (static_cast<std::size_t>(ey) >= out.size()) out.resize(ey + 1);
        if (static_cast<std::size_t>(ex) >= out[ey].size())
            out[ey].resize(ex + 1, Complex(0.0));
        out[ey][ex] += p.coefficients()[t];
    }
    return out;
}

inline UniPoly uni_eval_bipoly_at_x(const BiPoly& bp, Complex x) {
    UniPoly out;  // polynomial in y
    for (const auto& cx : bp) {
        Complex v = 0.0;
        for (std::size_t i = cx.size(); i-- > 0;) v = v * x + cx[i];
        out.push_back(v);
    }
    return out;
}

/// Sylvester resultant of p, q in y (coefficients are polynomials in x),
/// evaluated symbolically by interpolation: the resultant is a univariate
/// polynomial in x of degree <= deg_x(p)*deg_y(q) + deg_x(q)*deg_y(p); we
/// sample it at enough points and interpolate.
inline UniPoly resultant_in_y(const Polynomial& p, const Polynomial& q) {
    BiPoly bp = bipoly_from(p), bq = bipoly_from(q);
    auto degx = [](const BiPoly& b) {
        int d = 0;
        for (const auto& row : b) d = std::max(d, static_cast<int>(row.size()) - 1);
        return d;
    };
    const int bound = degx(bp) * (static_cast<int>(bq.size()) - 1) +
                      degx(bq) * (static_cast<int>(bp.size()) - 1) + 1;
    const int m = bound + 1;

    Eigen::MatrixXcd vander(m, m);
    Eigen::VectorXcd values(m);
    for (int s = 0; s < m; ++s) {
        // sample points on a circle of radius 1.37 (avoids symmetry traps)
        double ang = 2.0 * 3.14159265358979323846 * s / m + 0.29;
        Complex x = 1.37 * Complex(std::cos(ang), std::sin(ang));
        UniPoly py = uni_trim(uni_eval_bipoly_at_x(bp, x), 1e-12);
        UniPoly qy = uni_trim(uni_eval_bipoly_at_x(bq, x), 1e-12);
        const int dp = static_cast<int>(py.size()) - 1;
        const int dq = static_cast<int>(qy.size()) - 1;
        Complex res;
        if (dp < 1 && dq < 1) {
            res = 0.0;
        } else {
            const int dim = dp + dq;
            Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(dim, dim);
            for (int r = 0; r < dq; ++r)
                for (int c = 0; c <= dp; ++c) syl(r, r + c) = py[dp - c];
            for (int r = 0; r < dp; ++r)
                for (int c = 0; c <= dq; ++c) syl(dq + r, r + c) = qy[dq - c];
            res = syl.determinant();
        }
        values(s) = res;
        for (int c = 0; c < m; ++c) vander(s, c) = std::pow(x, c);
    }
    Eigen::VectorXcd coeffs = vander.fullPivLu().solve(values);
    UniPoly out;
    for (int c = 0; c < m; ++c) out.push_back(coeffs(c));
    return uni_trim(out, 1e-7 * coeffs.cwiseAbs().maxCoeff());
}

/// All solutions of a square 2-variable system by resultants + companion
/// matrices: x-candidates from Res_y(p,q), y-candidates per x from the
/// univariate gcd-like intersection, candidates kept when both residuals are
/// small. Newton-polished on the system for sharp comparison.
inline std::vector<std::vector<Complex>> solve_2var_resultant(const PolySystem& sys,
                                                              double tol = 1e-6) {
    const Polynomial& p = sys.poly(0);
    const Polynomial& q = sys.poly(1);
    UniPoly rx = resultant_in_y(p, q);
    std::vector<std::vector<Complex>> out;
    EvalWorkspace ws;
    for (Complex x : uni_roots(rx)) {
        BiPoly bp = bipoly_from(p);
        UniPoly py = uni_trim(uni_eval_bipoly_at_x(bp, x), 1e-10);
        for (Complex y : uni_roots(py)) {
            std::vector<Complex> cand = {x, y};
            // Newton polish (uses only eval/jacobian, not the tracker)
            for (int it = 0; it < 50; ++it) {
                auto r = sys.eval(cand);
                double rn = std::max(std::abs(r[0]), std::abs(r[1]));
                if (rn < 1e-12) break;
                Eigen::MatrixXcd j = sys.jacobian_eval(cand);
                Eigen::Vector2cd rv(r[0], r[1]);
                Eigen::Vector2cd step = j.fullPivLu().solve(rv);
                cand[0] -= step(0);
                cand[1] -= step(1);
            }
            auto r = sys.eval(cand);
            if (std::max(std::abs(r[0]), std::abs(r[1])) > 1e-9) continue;
            bool dup = false;
            for (const auto& prev : out) {
                if (std::abs(prev[0] - cand[0]) < tol &&
                    std::abs(prev[1] - cand[1]) < tol)
                    dup = true;
            }
            if (!dup) out.push_back(cand);
        }
    }
    return out;
}

/// 3-variable oracle for systems whose last equation is linear in all
/// variables: eliminate the third variable through the linear equation and
/// fall back to the 2-variable resultant oracle.
inline std::vector<std::vector<Complex>> solve_3var_linear_elim(
    const PolySystem& sys, double tol = 1e-6) {
    const Polynomial& lin = sys.poly(2);
    // lin = a x + b y + c z + d with c != 0
    Complex a = 0, b = 0, c = 0, d = 0;
    for (std::size_t t = 0; t < lin.exponents().size(); ++t) {
        const auto& e = lin.exponents()[t];
        Complex coef = lin.coefficients()[t];
        if (e == Exponents{1, 0, 0}) a = coef;
        else if (e == Exponents{0, 1, 0}) b = coef;
        else if (e == Exponents{0, 0, 1}) c = coef;
        else if (e == Exponents{0, 0, 0}) d = coef;
    }
    // substitute z = -(a x + b y + d)/c into the two cubic equations
    auto substitute = [&](const Polynomial& p) {
        // expand (a x + b y + d)^k with the multinomial theorem
        std::vector<std::pair<Exponents, Complex>> terms;
        for (std::size_t t = 0; t < p.exponents().size(); ++t) {
            const auto& e = p.exponents()[t];
            Complex coef = p.coefficients()[t];
            int ez = e[2];
            // (z)^ez -> (-(a x + b y + d)/c)^ez, multinomial expansion
            std::vector<std::pair<Exponents, Complex>> acc = {{{e[0], e[1]}, coef}};
            for (int rep = 0; rep < ez; ++rep) {
                std::vector<std::pair<Exponents, Complex>> next;
                for (auto& [ee, cc] : acc) {
                    next.push_back({{ee[0] + 1, ee[1]}, cc * (-a / c)});
                    next.push_back({{ee[0], ee[1] + 1}, cc * (-b / c)});
                    next.push_back({{ee[0], ee[1]}, cc * (-d / c)});
                }
                acc = std::move(next);
            }
            for (auto& [ee, cc] : acc) terms.push_back({ee, cc});
        }
        return Polynomial(2, std::move(terms));
    };
    PolySystem reduced(2, {substitute(sys.poly(0)), substitute(sys.poly(1))});
    auto sols2 = solve_2var_resultant(reduced, tol);
    std::vector<std::vector<Complex>> out;
    for (auto& s : sols2) {
        Complex z = -(a * s[0] + b * s[1] + d) / c;
        out.push_back({s[0], s[1], z});
    }
    return out;
}

/// Match two root sets within tol in the coordinate infinity norm; both
/// directions must pair off exactly.
inline bool root_sets_match(std::vector<std::vector<Complex>> a,
                            std::vector<std::vector<Complex>> b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& ra : a) {
        bool found = false;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (used[i]) continue;
            double dist = 0.0;
            for (std::size_t j = 0; j < ra.size(); ++j)
                dist = std::max(dist, std::abs(ra[j] - b[i][j]));
            if (dist < tol) {
                used[i] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

// --- symbolic expansion oracle for the distance equations -------------------

/// Monomial support of one distance equation, expanded directly from the
/// equation's definition (independently of build_ac_system): for pair (i,j),
///   sum_k m_k [ S_ik (r_jk^2 - r_ik^2 - r_ij^2) + S_jk (r_ik^2 - r_jk^2 - r_ij^2) ],
/// S_ab = s_ab + lambda'. `collected`: drop monomials whose accumulated
/// coefficient vanishes.
std::vector<Exponents> ac_equation_support_oracle(int n, int i, int j,
                                                  bool collected);

}  // namespace nbcc::testing
