// Dense simplex solvers backing the mixed-cell feasibility tests.

#pragma once

#include <Eigen/Core>

namespace nbcc {

enum class LpStatus { kOptimal, kUnbounded, kInfeasible };

struct LpResult {
    LpStatus status;
    double value = 0.0;
};

/// min c.y  s.t.  D y = g, y >= 0, via two-phase revised simplex with dense
/// basis inverse. Rows of D must be few (this is used on duals whose row
/// count is the ambient dimension, <= ~21 here).
LpResult simplex_solve(const Eigen::MatrixXd& D, const Eigen::VectorXd& g,
                       const Eigen::VectorXd& c);

/// Feasibility workhorse: max eps  s.t.  E a = f, G a + eps <= h, with `a`
/// free. Equalities are eliminated onto the nullspace, the remaining LP is
/// solved through its dual. kUnbounded means eps can grow without limit
/// (vacuously feasible); kOptimal reports the best slack.
LpResult max_slack_lp(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                      const Eigen::MatrixXd& G, const Eigen::VectorXd& h);

}  // namespace nbcc
