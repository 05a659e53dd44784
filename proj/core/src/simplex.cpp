#include "nbcc/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nbcc {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

// Revised simplex with dense basis inverse. Only the first n_price columns
// are allowed to enter the basis. Returns false if unbounded.
bool simplex_core(const Eigen::MatrixXd& D, const Eigen::VectorXd& c, int n_price,
                  std::vector<int>& basis, Eigen::MatrixXd& binv,
                  Eigen::VectorXd& xb, long max_iters) {
    const int m = static_cast<int>(D.rows());
    Eigen::VectorXd lambda(m), col(m), cb(m);
    for (long iter = 0; iter < max_iters; ++iter) {
        for (int i = 0; i < m; ++i) cb[i] = c[basis[i]];
        lambda.noalias() = binv.transpose() * cb;
        // pricing: most negative reduced cost (Dantzig), Bland's rule on stall
        bool bland = iter > 2L * (m + n_price);
        int enter = -1;
        double best = -kCostTol;
        for (int j = 0; j < n_price; ++j) {
            double rc = c[j] - lambda.dot(D.col(j));
            if (rc < -kCostTol) {
                if (bland) { enter = j; break; }
                if (rc < best) { best = rc; enter = j; }
            }
        }
        if (enter < 0) return true;  // optimal
        col.noalias() = binv * D.col(enter);
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (col[i] > kPivotTol) {
                double r = xb[i] / col[i];
                if (r < best_ratio - 1e-12 ||
                    (r < best_ratio + 1e-12 && leave >= 0 && basis[i] < basis[leave])) {
                    best_ratio = r;
                    leave = i;
                }
            }
        }
        if (leave < 0) return false;  // unbounded
        double piv = col[leave];
        xb[leave] /= piv;
        binv.row(leave) /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double factor = col[i];
            if (factor != 0.0) {
                xb[i] -= factor * xb[leave];
                binv.row(i) -= factor * binv.row(leave);
            }
        }
        basis[leave] = enter;
    }
    throw std::runtime_error("simplex: iteration limit reached");
}

}  // namespace

LpResult simplex_solve(const Eigen::MatrixXd& Din, const Eigen::VectorXd& gin,
                       const Eigen::VectorXd& c) {
    const int m = static_cast<int>(Din.rows());
    const int n = static_cast<int>(Din.cols());
    // Nonnegative RHS, then artificial identity columns for the start basis.
    Eigen::MatrixXd D(m, n + m);
    Eigen::VectorXd g = gin;
    D.leftCols(n) = Din;
    D.rightCols(m).setZero();
    for (int i = 0; i < m; ++i) {
        if (g[i] < 0.0) {
            g[i] = -g[i];
            D.row(i).head(n) = -Din.row(i);
        }
        D(i, n + i) = 1.0;
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd xb = g;
    const long cap = 50L * (m + n) + 2000;

    // Phase 1: minimize the artificial sum.
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
    c1.tail(m).setOnes();
    if (!simplex_core(D, c1, n + m, basis, binv, xb, cap))
        throw std::runtime_error("simplex: phase 1 unbounded");
    double art = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n) art += xb[i];
    if (art > 1e-8) return {LpStatus::kInfeasible, 0.0};

    // Pivot remaining zero-level artificials out wherever an original column
    // has a nonzero entry in their row; rows with none are redundant and the
    // artificial can never leave zero (its row of binv*D vanishes on original
    // columns), so it is safe to leave basic.
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (int j = 0; j < n; ++j) {
            double v = binv.row(i).dot(D.col(j));
            if (std::abs(v) > 1e-9) {
                Eigen::VectorXd col = binv * D.col(j);
                double piv = col[i];
                xb[i] /= piv;
                binv.row(i) /= piv;
                for (int r = 0; r < m; ++r) {
                    if (r == i) continue;
                    double factor = col[r];
                    if (factor != 0.0) {
                        xb[r] -= factor * xb[i];
                        binv.row(r) -= factor * binv.row(i);
                    }
                }
                basis[i] = j;
                break;
            }
        }
    }

    // Phase 2: original objective; artificial columns never re-enter.
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + m);
    c2.head(n) = c;
    if (!simplex_core(D, c2, n, basis, binv, xb, cap))
        return {LpStatus::kUnbounded, 0.0};
    double val = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) val += c[basis[i]] * xb[i];
    return {LpStatus::kOptimal, val};
}

LpResult max_slack_lp(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                      const Eigen::MatrixXd& G, const Eigen::VectorXd& h) {
    const int nv = static_cast<int>(E.cols());
    Eigen::MatrixXd null_basis;
    Eigen::VectorXd alpha0;
    if (E.rows() == 0) {
        null_basis = Eigen::MatrixXd::Identity(nv, nv);
        alpha0 = Eigen::VectorXd::Zero(nv);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(E);
        alpha0 = cod.solve(f);
        if ((E * alpha0 - f).lpNorm<Eigen::Infinity>() > 1e-8)
            return {LpStatus::kInfeasible, 0.0};
        Eigen::FullPivLU<Eigen::MatrixXd> lu(E);
        lu.setThreshold(1e-9);
        null_basis = lu.kernel();  // nv x d
        if (null_basis.cols() == 1 && null_basis.isZero(0.0))
            null_basis.resize(nv, 0);
    }
    const int d = static_cast<int>(null_basis.cols());
    const int m = static_cast<int>(G.rows());
    if (m == 0) return {LpStatus::kUnbounded, 0.0};

    // primal: max eps s.t. (G N) beta + 1 eps <= h - G alpha0
    // dual:   min hh.y  s.t. (G N)^T y = 0, 1.y = 1, y >= 0
    Eigen::VectorXd hh = h - G * alpha0;
    Eigen::MatrixXd GN = G * null_basis;
    Eigen::MatrixXd D(d + 1, m);
    D.topRows(d) = GN.transpose();
    D.row(d).setOnes();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
    g[d] = 1.0;
    LpResult dual = simplex_solve(D, g, hh);
    if (dual.status == LpStatus::kInfeasible) return {LpStatus::kUnbounded, 0.0};
    if (dual.status == LpStatus::kUnbounded) return {LpStatus::kInfeasible, 0.0};
    return {LpStatus::kOptimal, dual.value};
}

}  // namespace nbcc
