#include "nbcc/classify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nbcc/acsys.hpp"

namespace nbcc {

namespace {

// plain Newton on the real system; the endpoints are already close
bool real_refine(const PolySystem& system, std::vector<double>& x, double tol,
                 int max_iter, double& residual_out, double& condition_out) {
    const int n = system.nvars();
    EvalWorkspace ws;
    std::vector<Complex> xc(n), res(n);
    Eigen::MatrixXcd jac(n, n);
    Eigen::VectorXd rv(n), step(n);
    Eigen::MatrixXd jr(n, n);
    double rnorm = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    for (int it = 0; it <= max_iter; ++it) {
        for (int i = 0; i < n; ++i) xc[i] = x[i];
        system.eval(xc, res, ws);
        rnorm = 0.0;
        for (int i = 0; i < n; ++i) rnorm = std::max(rnorm, std::abs(res[i]));
        if (rnorm < tol || it == max_iter) break;
        system.jacobian_eval(xc, jac, ws);
        jr = jac.real();
        lu.compute(jr);
        for (int i = 0; i < n; ++i) rv(i) = res[i].real();
        step = lu.solve(rv);
        if (!step.allFinite()) return false;
        for (int i = 0; i < n; ++i) x[i] -= step(i);
    }
    residual_out = rnorm;
    // kappa_inf at the refined point
    for (int i = 0; i < n; ++i) xc[i] = x[i];
    system.jacobian_eval(xc, jac, ws);
    jr = jac.real();
    lu.compute(jr);
    Eigen::MatrixXd inv = lu.inverse();
    double jn = 0.0, in = 0.0;
    for (int i = 0; i < n; ++i) {
        jn = std::max(jn, jr.row(i).cwiseAbs().sum());
        in = std::max(in, inv.row(i).cwiseAbs().sum());
    }
    condition_out = jn * in;
    return rnorm < tol && std::isfinite(condition_out);
}

}  // namespace

std::vector<RealSolution> filter_real(const SolutionSet& solutions,
                                      const PolySystem& system,
                                      const RealnessPolicy& policy) {
    std::vector<RealSolution> out;
    for (const auto& rec : solutions.records) {
        double maxim = 0.0;
        for (const Complex& c : rec.endpoint)
            maxim = std::max(maxim, std::abs(c.imag()));
        if (maxim >= policy.theta) continue;
        RealSolution rs;
        rs.point.reserve(rec.endpoint.size());
        for (const Complex& c : rec.endpoint) rs.point.push_back(c.real());
        if (real_refine(system, rs.point, 1e-12, 30, rs.residual, rs.condition))
            out.push_back(std::move(rs));
    }
    return out;
}

std::vector<PhysicalSolution> filter_physical(const std::vector<RealSolution>& real,
                                              int n) {
    const int k = n * (n - 1) / 2;
    std::vector<PhysicalSolution> out;
    for (const auto& rs : real) {
        if (static_cast<int>(rs.point.size()) != 2 * k)
            throw std::invalid_argument("filter_physical: wrong point length");
        bool positive = true;
        for (int p = 0; p < k; ++p)
            if (!(rs.point[p] > 0.0)) { positive = false; break; }
        if (!positive) continue;
        PhysicalSolution ps;
        ps.distances.assign(rs.point.begin(), rs.point.begin() + k);
        ps.full_point = rs.point;
        ps.residual = rs.residual;
        ps.condition = rs.condition;
        out.push_back(std::move(ps));
    }
    return out;
}

double cayley_menger_det(std::span<const double> distances, int n,
                         std::span<const int> subset) {
    auto indexing = DistanceIndexing::make(n);
    const int m = static_cast<int>(subset.size());
    Eigen::MatrixXd cm(m + 1, m + 1);
    cm.setZero();
    for (int i = 0; i < m; ++i) {
        cm(0, i + 1) = 1.0;
        cm(i + 1, 0) = 1.0;
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            double d = distances[indexing.index(subset[i], subset[j])];
            cm(i + 1, j + 1) = d * d;
        }
    }
    return cm.determinant();
}

namespace {

void subsets_of_size(int n, int m, std::vector<std::vector<int>>& out) {
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        out.push_back(idx);
        int i = m - 1;
        while (i >= 0 && idx[i] == n - m + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

int cm_dimension(std::span<const double> distances, int n, double tol) {
    for (double d : distances)
        if (!(d > 0.0))
            throw std::invalid_argument("cm_dimension: non-positive distance");
    double dmax = 0.0;
    for (double d : distances) dmax = std::max(dmax, d);

    for (int dim = 1; dim <= n - 2; ++dim) {
        const int m = dim + 2;  // subset size whose determinants must vanish
        std::vector<std::vector<int>> subs;
        subsets_of_size(n, m, subs);
        bool all_zero = true;
        for (const auto& sub : subs) {
            double det = cayley_menger_det(distances, n, sub);
            double scale = std::pow(dmax, 2.0 * (m - 1));
            if (std::abs(det) >= tol * scale) { all_zero = false; break; }
        }
        if (all_zero) return dim;
    }
    // full dimension: the n-point determinant must carry the sign (-1)^n of
    // a genuinely (n-1)-dimensional configuration, otherwise the distances
    // are not realizable at all
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    double det = cayley_menger_det(distances, n, all);
    double expected_sign = (n % 2 == 0) ? 1.0 : -1.0;
    if (det * expected_sign <= 0.0)
        throw std::runtime_error("cm_dimension: distances not embeddable");
    return n - 1;
}

std::vector<double> permute_distances(std::span<const double> distances, int n,
                                      std::span<const int> perm) {
    auto indexing = DistanceIndexing::make(n);
    std::vector<double> out(distances.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out[indexing.index(perm[i], perm[j])] = distances[indexing.index(i, j)];
    return out;
}

std::vector<double> canonical_distances(std::span<const double> distances, int n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> canon(distances.begin(), distances.end());
    do {
        auto img = permute_distances(distances, n, perm);
        if (std::lexicographical_compare(img.begin(), img.end(), canon.begin(),
                                         canon.end()))
            canon = img;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return canon;
}

std::vector<ConfigurationClass> orbit_classify(
    const std::vector<PhysicalSolution>& physical, int n, double match_tol) {
    auto indexing = DistanceIndexing::make(n);
    (void)indexing;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> perms;
    do {
        perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const int factorial = static_cast<int>(perms.size());

    struct Member {
        std::vector<double> canon;
        int isotropy = 0;
        const PhysicalSolution* sol;
    };
    std::vector<Member> members;
    members.reserve(physical.size());
    for (const auto& ps : physical) {
        Member m;
        m.sol = &ps;
        m.canon = ps.distances;
        int iso = 0;
        for (const auto& p : perms) {
            auto img = permute_distances(ps.distances, n, p);
            if (std::lexicographical_compare(img.begin(), img.end(), m.canon.begin(),
                                             m.canon.end()))
                m.canon = img;
            double dist = 0.0;
            for (std::size_t i = 0; i < img.size(); ++i)
                dist = std::max(dist, std::abs(img[i] - ps.distances[i]));
            if (dist < match_tol) ++iso;
        }
        if (factorial % iso != 0)
            throw std::runtime_error(
                "orbit_classify: isotropy order does not divide n! "
                "(match tolerance misconfigured)");
        m.isotropy = iso;
        members.push_back(std::move(m));
    }

    // group by canonical form within match_tol
    std::vector<ConfigurationClass> classes;
    std::vector<std::vector<const Member*>> groups;
    for (const auto& m : members) {
        bool placed = false;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            double dist = 0.0;
            for (std::size_t i = 0; i < m.canon.size(); ++i)
                dist = std::max(dist,
                                std::abs(m.canon[i] - groups[g][0]->canon[i]));
            if (dist < match_tol) {
                if (m.isotropy != groups[g][0]->isotropy)
                    throw std::runtime_error(
                        "orbit_classify: members of one class disagree on isotropy");
                groups[g].push_back(&m);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({&m});
    }

    for (const auto& g : groups) {
        ConfigurationClass cls;
        cls.representative = g[0]->canon;
        cls.isotropy_order = g[0]->isotropy;
        cls.orbit_size = factorial / cls.isotropy_order;
        cls.member_count = static_cast<int>(g.size());
        cls.dimension = cm_dimension(cls.representative, n);
        cls.residual = g[0]->sol->residual;
        cls.condition = g[0]->sol->condition;
        cls.certified = g[0]->sol->certified;
        classes.push_back(std::move(cls));
    }
    std::sort(classes.begin(), classes.end(),
              [](const ConfigurationClass& a, const ConfigurationClass& b) {
                  if (a.dimension != b.dimension) return a.dimension < b.dimension;
                  if (a.isotropy_order != b.isotropy_order)
                      return a.isotropy_order > b.isotropy_order;
                  return a.representative < b.representative;
              });
    return classes;
}

}  // namespace nbcc
