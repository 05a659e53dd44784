#include "nbcc/mixedcells.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "nbcc/simplex.hpp"

namespace nbcc {

namespace {

constexpr double kTieTol = 1e-9;

// mt19937_64 bits mapped to (0,1) doubles directly so the stream is
// identical across standard library implementations.
double unit_double(std::mt19937_64& rng) {
    double u;
    do {
        u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } while (u <= 0.0);
    return u;
}

struct Edge {
    int a, b;
};

// Incremental LP state for the DFS: equalities/inequalities of the chosen
// edges stacked into preallocated matrices.
class FeasibilityOracle {
public:
    explicit FeasibilityOracle(const std::vector<LiftedSupport>& lifted)
        : lifted_(lifted) {
        nv_ = lifted.empty() || lifted[0].points.empty()
                  ? 0
                  : static_cast<int>(lifted[0].points[0].size());
        int rows = 0;
        for (const auto& s : lifted_) rows += static_cast<int>(s.points.size());
        E_.resize(static_cast<int>(lifted_.size()), nv_);
        f_.resize(static_cast<int>(lifted_.size()));
        G_.resize(rows, nv_);
        h_.resize(rows);
    }

    void push(int si, Edge e) {
        const auto& s = lifted_[si];
        const Exponents& pa = s.points[e.a];
        const Exponents& pb = s.points[e.b];
        for (int j = 0; j < nv_; ++j) E_(neq_, j) = pa[j] - pb[j];
        f_(neq_) = s.lifts[e.b] - s.lifts[e.a];
        ++neq_;
        for (int c = 0; c < static_cast<int>(s.points.size()); ++c) {
            if (c == e.a || c == e.b) continue;
            const Exponents& pc = s.points[c];
            for (int j = 0; j < nv_; ++j) G_(nineq_, j) = pa[j] - pc[j];
            h_(nineq_) = s.lifts[c] - s.lifts[e.a];
            ++nineq_;
        }
        frames_.push_back({neq_, nineq_});
    }

    void pop() {
        frames_.pop_back();
        if (frames_.empty()) {
            neq_ = 0;
            nineq_ = 0;
        } else {
            neq_ = frames_.back().first;
            nineq_ = frames_.back().second;
        }
    }

    /// Feasibility of the current selection with strictly positive slack.
    /// Throws DegenerateLiftingError when the best slack ties with zero.
    bool feasible() const {
        if (nineq_ == 0) return true;
        LpResult r = max_slack_lp(E_.topRows(neq_), f_.head(neq_),
                                  G_.topRows(nineq_), h_.head(nineq_));
        if (r.status == LpStatus::kInfeasible) return false;
        if (r.status == LpStatus::kUnbounded) return true;
        if (std::abs(r.value) <= kTieTol)
            throw DegenerateLiftingError("lifting produced an LP tie; re-lift");
        return r.value > 0.0;
    }

private:
    const std::vector<LiftedSupport>& lifted_;
    int nv_ = 0;
    int neq_ = 0;
    int nineq_ = 0;
    Eigen::MatrixXd E_, G_;
    Eigen::VectorXd f_, h_;
    std::vector<std::pair<int, int>> frames_;
};

long long cell_volume(const std::vector<LiftedSupport>& lifted,
                      const std::vector<std::pair<int, int>>& edges) {
    const int n = static_cast<int>(lifted.size());
    std::vector<std::vector<long long>> m(n, std::vector<long long>(n));
    for (int i = 0; i < n; ++i) {
        const auto& pts = lifted[i].points;
        const Exponents& pa = pts[edges[i].first];
        const Exponents& pb = pts[edges[i].second];
        for (int j = 0; j < n; ++j) m[i][j] = pa[j] - pb[j];
    }
    return integer_det_abs(std::move(m));
}

}  // namespace

long long integer_det_abs(std::vector<std::vector<long long>> m) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = m[i][j];
    __int128 prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[k][k] == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[i][k] != 0) { p = i; break; }
            if (p < 0) return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    __int128 det = a[n - 1][n - 1] * sign;
    if (det < 0) det = -det;
    if (det > static_cast<__int128>(~0ULL >> 1))
        throw std::overflow_error("cell volume exceeds 63 bits");
    return static_cast<long long>(det);
}

std::vector<LiftedSupport> lift_supports(
    const std::vector<std::vector<Exponents>>& supports, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<LiftedSupport> out;
    out.reserve(supports.size());
    for (const auto& s : supports) {
        if (s.empty()) throw std::invalid_argument("lift_supports: empty support");
        LiftedSupport ls;
        ls.points = s;
        ls.lifts.reserve(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) ls.lifts.push_back(unit_double(rng));
        out.push_back(std::move(ls));
    }
    return out;
}

void enumerate_cells(const std::vector<LiftedSupport>& lifted,
                     const std::function<void(const MixedCell&)>& sink) {
    const int n = static_cast<int>(lifted.size());
    if (n == 0) return;
    const int nv = static_cast<int>(lifted[0].points[0].size());
    if (n != nv)
        throw std::invalid_argument("enumerate_cells: system not square");

    FeasibilityOracle oracle(lifted);

    // Per-support candidate edges: pairs that appear on the lifted lower hull.
    std::vector<std::vector<Edge>> cand(n);
    for (int si = 0; si < n; ++si) {
        const int np = static_cast<int>(lifted[si].points.size());
        if (np < 2)
            throw std::invalid_argument("enumerate_cells: support with < 2 points");
        for (int a = 0; a < np; ++a) {
            for (int b = a + 1; b < np; ++b) {
                oracle.push(si, {a, b});
                bool ok = oracle.feasible();
                oracle.pop();
                if (ok) cand[si].push_back({a, b});
            }
        }
    }

    // Pairwise edge-compatibility tables: compat[si][sj][ei] is a bitmask of
    // edges of sj jointly feasible with edge ei of si.
    std::vector<std::vector<std::vector<std::uint64_t>>> compat(
        n, std::vector<std::vector<std::uint64_t>>(n));
    std::vector<int> words(n);
    for (int si = 0; si < n; ++si)
        words[si] = (static_cast<int>(cand[si].size()) + 63) / 64;
    for (int si = 0; si < n; ++si) {
        for (int sj = si + 1; sj < n; ++sj) {
            auto& tij = compat[si][sj];
            auto& tji = compat[sj][si];
            tij.assign(cand[si].size() * words[sj], 0);
            tji.assign(cand[sj].size() * words[si], 0);
            for (std::size_t ei = 0; ei < cand[si].size(); ++ei) {
                oracle.push(si, cand[si][ei]);
                for (std::size_t ej = 0; ej < cand[sj].size(); ++ej) {
                    oracle.push(sj, cand[sj][ej]);
                    bool ok = oracle.feasible();
                    oracle.pop();
                    if (ok) {
                        tij[ei * words[sj] + ej / 64] |= 1ULL << (ej % 64);
                        tji[ej * words[si] + ei / 64] |= 1ULL << (ei % 64);
                    }
                }
                oracle.pop();
            }
        }
    }

    // DFS over supports, dynamically picking the one with fewest surviving
    // candidates. Survivor sets are bitmasks refined by the compat tables.
    std::vector<std::vector<std::uint64_t>> alive(n);
    for (int si = 0; si < n; ++si) {
        alive[si].assign(words[si], 0);
        for (std::size_t e = 0; e < cand[si].size(); ++e)
            alive[si][e / 64] |= 1ULL << (e % 64);
    }
    std::vector<bool> chosen(n, false);
    std::vector<std::pair<int, int>> sel(n, {-1, -1});
    std::vector<MixedCell> cells;
    // per-depth save area for the survivor bitmasks
    std::vector<std::vector<std::vector<std::uint64_t>>> saved(
        n, std::vector<std::vector<std::uint64_t>>(n));

    auto popcount_alive = [&](int si) {
        int c = 0;
        for (std::uint64_t w : alive[si]) c += __builtin_popcountll(w);
        return c;
    };

    std::function<void(int)> dfs = [&](int depth) {
        if (depth == n) {
            MixedCell cell;
            cell.edges = sel;
            cell.volume = cell_volume(lifted, cell.edges);
            cells.push_back(std::move(cell));
            return;
        }
        int si = -1, best = INT32_MAX;
        for (int s = 0; s < n; ++s) {
            if (chosen[s]) continue;
            int c = popcount_alive(s);
            if (c < best) { best = c; si = s; }
        }
        if (si < 0 || best == 0) return;
        chosen[si] = true;
        for (std::size_t e = 0; e < cand[si].size(); ++e) {
            if (!(alive[si][e / 64] >> (e % 64) & 1)) continue;
            oracle.push(si, cand[si][e]);
            if (oracle.feasible()) {
                // refine survivor sets of the remaining supports
                for (int s = 0; s < n; ++s) {
                    if (chosen[s]) continue;
                    saved[depth][s] = alive[s];
                    const auto& t = compat[si][s];
                    for (int w = 0; w < words[s]; ++w)
                        alive[s][w] &= t[e * words[s] + w];
                }
                sel[si] = {cand[si][e].a, cand[si][e].b};
                dfs(depth + 1);
                sel[si] = {-1, -1};
                for (int s = 0; s < n; ++s)
                    if (!chosen[s]) alive[s] = saved[depth][s];
            }
            oracle.pop();
        }
        chosen[si] = false;
    };
    dfs(0);

    std::sort(cells.begin(), cells.end(), [](const MixedCell& x, const MixedCell& y) {
        return x.edges < y.edges;
    });
    for (const auto& c : cells) sink(c);
}

std::vector<MixedCell> enumerate_cells(const std::vector<LiftedSupport>& lifted) {
    std::vector<MixedCell> out;
    enumerate_cells(lifted, [&](const MixedCell& c) { out.push_back(c); });
    return out;
}

MixedVolumeResult mixed_volume(const PolySystem& system, std::uint64_t seed,
                               bool keep_cells) {
    if (!system.square())
        throw std::invalid_argument("mixed_volume: system not square");
    auto supports = system.supports();
    for (int attempt = 0; attempt < 32; ++attempt) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        auto lifted = lift_supports(supports, s);
        MixedVolumeResult result;
        result.lifting_seed = s;
        try {
            enumerate_cells(lifted, [&](const MixedCell& c) {
                result.mixed_volume += static_cast<unsigned long long>(c.volume);
                if (keep_cells) result.cells.push_back(c);
            });
        } catch (const DegenerateLiftingError&) {
            continue;
        }
        return result;
    }
    throw std::runtime_error("mixed_volume: persistent degenerate liftings");
}

}  // namespace nbcc
