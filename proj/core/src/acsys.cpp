#include "nbcc/acsys.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace nbcc {

void MassVector::validate() const {
    if (n() < 3) throw std::invalid_argument("MassVector: need n >= 3 bodies");
    for (double m : masses)
        if (!(m > 0.0)) throw std::invalid_argument("MassVector: masses must be > 0");
}

DistanceIndexing DistanceIndexing::make(int n) {
    DistanceIndexing idx;
    idx.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) idx.pairs.emplace_back(i, j);
    return idx;
}

int DistanceIndexing::index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // lexicographic offset for pair (i,j), 0-based
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

// The distance equation for pair (i,j) expands, after the S_ii = 0 terms are
// dropped, to
//   sum_k m_k [ S_ik (r_jk^2 - r_ik^2 - r_ij^2) + S_jk (r_ik^2 - r_jk^2 - r_ij^2) ]
// with S_ab = s_ab + lambda' once the auxiliary variable s_ab stands in for
// r_ab^-3. The lambda' parts of the two bracket halves cancel on the r_ik^2
// and r_jk^2 monomials; those monomials are retained with coefficient zero
// (ZeroPolicy::kKeep) because the reference path counts -- 82,593 traced
// curves at n=4, 439,690,761 at n=5 -- are the mixed volumes of the supports
// of the expansion as written, cancellations included. Collecting them away
// shrinks the polytopes and the counts (33,201 at n=4).
ACSystem build_ac_system(const MassVector& masses, double lambda_prime) {
    masses.validate();
    const int n = masses.n();
    auto indexing = DistanceIndexing::make(n);
    const int k = indexing.count();
    const int nv = 2 * k;

    std::vector<Polynomial> polys;
    polys.reserve(nv);
    for (const auto& [i, j] : indexing.pairs) {
        std::vector<std::pair<Exponents, Complex>> terms;
        for (int kk = 0; kk < n; ++kk) {
            // the (a,b) = (i,j) then (j,i) halves of the bracket
            const int ab[2][2] = {{i, j}, {j, i}};
            for (const auto& half : ab) {
                const int a = half[0], b = half[1];
                if (kk == a) continue;  // S_aa = 0
                const int svar = k + indexing.index(a, kk);
                // quadratic factor (r_bk^2 - r_ak^2 - r_ab^2); r_bk absent when kk==b
                std::vector<std::pair<int, double>> quad;
                if (kk != b) quad.emplace_back(indexing.index(b, kk), 1.0);
                quad.emplace_back(indexing.index(a, kk), -1.0);
                quad.emplace_back(indexing.index(a, b), -1.0);
                for (const auto& [rvar, sgn] : quad) {
                    Exponents e1(nv, 0);
                    e1[rvar] = 2;
                    e1[svar] = 1;
                    terms.emplace_back(e1, Complex(masses.masses[kk] * sgn, 0.0));
                    Exponents e2(nv, 0);
                    e2[rvar] = 2;
                    terms.emplace_back(e2,
                                       Complex(masses.masses[kk] * sgn * lambda_prime, 0.0));
                }
            }
        }
        polys.emplace_back(nv, std::move(terms), ZeroPolicy::kKeep);
    }
    // constraint block: s_ij r_ij^3 - 1 = 0
    for (int p = 0; p < k; ++p) {
        std::vector<std::pair<Exponents, Complex>> terms;
        Exponents e(nv, 0);
        e[p] = 3;
        e[k + p] = 1;
        terms.emplace_back(e, Complex(1.0, 0.0));
        terms.emplace_back(Exponents(nv, 0), Complex(-1.0, 0.0));
        polys.emplace_back(nv, std::move(terms));
    }

    ACSystem sys;
    sys.n = n;
    sys.lambda_prime = lambda_prime;
    sys.indexing = std::move(indexing);
    sys.system = PolySystem(nv, std::move(polys));
    return sys;
}

std::vector<Complex> ACSystem::lift_distances(std::span<const double> distances) const {
    auto real = lift_distances_real(distances);
    return {real.begin(), real.end()};
}

std::vector<double> ACSystem::lift_distances_real(
    std::span<const double> distances) const {
    const int k = indexing.count();
    if (static_cast<int>(distances.size()) != k)
        throw std::invalid_argument("lift_distances: wrong length");
    std::vector<double> out(2 * k);
    for (int p = 0; p < k; ++p) {
        out[p] = distances[p];
        out[k + p] = 1.0 / (distances[p] * distances[p] * distances[p]);
    }
    return out;
}

std::vector<double> ac_residual(std::span<const double> distances,
                                const MassVector& masses, double lambda_prime) {
    masses.validate();
    const int n = masses.n();
    auto indexing = DistanceIndexing::make(n);
    const int k = indexing.count();
    if (static_cast<int>(distances.size()) != k)
        throw std::invalid_argument("ac_residual: wrong distance count");
    for (double d : distances)
        if (!(d > 0.0)) throw std::invalid_argument("ac_residual: non-positive distance");

    auto r2 = [&](int a, int b) {
        double d = distances[indexing.index(a, b)];
        return d * d;
    };
    auto S = [&](int a, int b) {
        double d = distances[indexing.index(a, b)];
        return 1.0 / (d * d * d) + lambda_prime;
    };

    std::vector<double> out;
    out.reserve(k);
    for (const auto& [i, j] : indexing.pairs) {
        double acc = 0.0;
        for (int kk = 0; kk < n; ++kk) {
            double term = 0.0;
            if (kk != i)
                term += S(i, kk) * ((kk != j ? r2(j, kk) : 0.0) - r2(i, kk) - r2(i, j));
            if (kk != j)
                term += S(j, kk) * ((kk != i ? r2(i, kk) : 0.0) - r2(j, kk) - r2(i, j));
            acc += masses.masses[kk] * term;
        }
        out.push_back(acc);
    }
    return out;
}

namespace {

// Analytic Jacobian of ac_residual with respect to the distances.
Eigen::MatrixXd ac_residual_jacobian(std::span<const double> d,
                                     const MassVector& masses,
                                     double lambda_prime) {
    const int n = masses.n();
    auto indexing = DistanceIndexing::make(n);
    const int k = indexing.count();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);

    auto idx = [&](int a, int b) { return indexing.index(a, b); };
    auto S = [&](int a, int b) {
        double v = d[idx(a, b)];
        return 1.0 / (v * v * v) + lambda_prime;
    };
    auto dS = [&](int a, int b) {  // dS_ab / d r_ab
        double v = d[idx(a, b)];
        return -3.0 / (v * v * v * v);
    };
    auto r2 = [&](int a, int b) {
        double v = d[idx(a, b)];
        return v * v;
    };

    int row = 0;
    for (const auto& [i, j] : indexing.pairs) {
        for (int kk = 0; kk < n; ++kk) {
            double m = masses.masses[kk];
            // S_ik (r_jk^2 - r_ik^2 - r_ij^2)
            if (kk != i) {
                double quad = (kk != j ? r2(j, kk) : 0.0) - r2(i, kk) - r2(i, j);
                jac(row, idx(i, kk)) += m * dS(i, kk) * quad;
                if (kk != j) jac(row, idx(j, kk)) += m * S(i, kk) * 2.0 * d[idx(j, kk)];
                jac(row, idx(i, kk)) += m * S(i, kk) * (-2.0 * d[idx(i, kk)]);
                jac(row, idx(i, j)) += m * S(i, kk) * (-2.0 * d[idx(i, j)]);
            }
            // S_jk (r_ik^2 - r_jk^2 - r_ij^2)
            if (kk != j) {
                double quad = (kk != i ? r2(i, kk) : 0.0) - r2(j, kk) - r2(i, j);
                jac(row, idx(j, kk)) += m * dS(j, kk) * quad;
                if (kk != i) jac(row, idx(i, kk)) += m * S(j, kk) * 2.0 * d[idx(i, kk)];
                jac(row, idx(j, kk)) += m * S(j, kk) * (-2.0 * d[idx(j, kk)]);
                jac(row, idx(i, j)) += m * S(j, kk) * (-2.0 * d[idx(i, j)]);
            }
        }
        ++row;
    }
    return jac;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

NewtonRefineResult newton_refine(std::span<const double> distances,
                                 const MassVector& masses, double tol, int max_iter,
                                 double lambda_prime) {
    const int k = static_cast<int>(distances.size());
    NewtonRefineResult result;
    result.distances.assign(distances.begin(), distances.end());
    for (double d : result.distances)
        if (!(d > 0.0))
            throw std::invalid_argument("newton_refine: non-positive distance");

    auto res = ac_residual(result.distances, masses, lambda_prime);
    double rnorm = inf_norm(res);
    for (int it = 0; it < max_iter; ++it) {
        if (rnorm < tol) {
            result.converged = true;
            break;
        }
        Eigen::MatrixXd jac = ac_residual_jacobian(result.distances, masses, lambda_prime);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (lu.rank() < k) break;  // singular: report non-convergence
        Eigen::Map<const Eigen::VectorXd> rv(res.data(), k);
        Eigen::VectorXd step = lu.solve(-rv);
        // damped: backtrack until the residual decreases and positivity holds
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<double> trial(k);
            bool positive = true;
            for (int p = 0; p < k; ++p) {
                trial[p] = result.distances[p] + t * step[p];
                if (!(trial[p] > 0.0)) { positive = false; break; }
            }
            if (positive) {
                auto tres = ac_residual(trial, masses, lambda_prime);
                double tnorm = inf_norm(tres);
                if (tnorm < rnorm || tnorm < tol) {
                    result.distances = std::move(trial);
                    res = std::move(tres);
                    rnorm = tnorm;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        result.iterations = it + 1;
        if (!accepted) break;
    }
    if (rnorm < tol) result.converged = true;
    result.residual = rnorm;
    return result;
}

}  // namespace nbcc
