#include "nbcc/tracker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "nbcc/orchestrate.hpp"
#include "nbcc/rng.hpp"

namespace nbcc {

void TrackerOptions::validate() const {
    if (!(0.0 < min_step && min_step < initial_step && initial_step < 1.0))
        throw std::invalid_argument("TrackerOptions: need 0 < min_step < initial_step < 1");
}

// --- Homotopy -------------------------------------------------------------

Homotopy::Homotopy(int nvars, std::vector<std::vector<Term>> equations, Complex gamma)
    : nvars_(nvars), gamma_(gamma), equations_(std::move(equations)) {
    if (gamma_ == Complex(0.0, 0.0))
        throw std::invalid_argument("Homotopy: gamma must be nonzero");
    max_deg_.assign(nvars_, 0);
    for (const auto& eq : equations_)
        for (const auto& term : eq)
            for (int j = 0; j < nvars_; ++j)
                max_deg_[j] = std::max(max_deg_[j], term.mono[j]);
    stride_ = 1;
    for (int d : max_deg_) stride_ = std::max(stride_, d + 1);
}

void Homotopy::prepare(double t, bool with_derivative, Workspace& ws) const {
    if (ws.prepared_t == t && (!with_derivative || ws.prepared_deriv)) return;
    std::size_t total = 0;
    for (const auto& eq : equations_) total += eq.size();
    ws.tpow.resize(total);
    ws.dtpow.resize(total);
    const double logt = t > 0.0 ? std::log(t) : 0.0;
    std::size_t idx = 0;
    for (const auto& eq : equations_) {
        for (const auto& term : eq) {
            const double e = term.t_exponent;
            if (e == 0.0) {
                ws.tpow[idx] = 1.0;
                ws.dtpow[idx] = 0.0;
            } else if (t == 0.0) {
                ws.tpow[idx] = 0.0;
                // the global exponent scale makes the smallest positive
                // exponent 1 up to roundoff; nothing sits below it
                ws.dtpow[idx] = (std::abs(e - 1.0) < 1e-9) ? 1.0 : 0.0;
            } else {
                const double p = std::exp(e * logt);
                ws.tpow[idx] = p;
                ws.dtpow[idx] = e * p / t;
            }
            ++idx;
        }
    }
    ws.prepared_t = t;
    ws.prepared_deriv = true;
}

namespace {
inline void fill_powers(std::span<const Complex> y, const std::vector<int>& max_deg,
                        int stride, std::vector<Complex>& powers) {
    const int nv = static_cast<int>(max_deg.size());
    powers.resize(static_cast<std::size_t>(nv) * stride);
    for (int j = 0; j < nv; ++j) {
        Complex* row = powers.data() + static_cast<std::size_t>(j) * stride;
        row[0] = 1.0;
        for (int p = 1; p <= max_deg[j]; ++p) row[p] = row[p - 1] * y[j];
    }
}
}  // namespace

void Homotopy::eval(std::span<const Complex> y, double t, std::span<Complex> out,
                    Workspace& ws) const {
    prepare(t, false, ws);
    fill_powers(y, max_deg_, stride_, ws.powers);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < equations_.size(); ++i) {
        Complex sum = 0.0;
        for (const auto& term : equations_[i]) {
            const Complex blend =
                (1.0 - t) * gamma_ * term.generic_coeff + t * term.target_coeff;
            Complex m = blend * ws.tpow[idx];
            ++idx;
            if (m != Complex(0.0, 0.0)) {
                for (int j = 0; j < nvars_; ++j) {
                    const int e = term.mono[j];
                    if (e) m *= ws.powers[static_cast<std::size_t>(j) * stride_ + e];
                }
            }
            sum += m;
        }
        out[i] = sum;
    }
}

void Homotopy::jacobian(std::span<const Complex> y, double t, Eigen::MatrixXcd& jac,
                        Workspace& ws) const {
    prepare(t, false, ws);
    fill_powers(y, max_deg_, stride_, ws.powers);
    jac.setZero(static_cast<Eigen::Index>(equations_.size()), nvars_);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < equations_.size(); ++i) {
        for (const auto& term : equations_[i]) {
            const Complex blend =
                (1.0 - t) * gamma_ * term.generic_coeff + t * term.target_coeff;
            const Complex base = blend * ws.tpow[idx];
            ++idx;
            if (base == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < nvars_; ++j) {
                const int ej = term.mono[j];
                if (!ej) continue;
                Complex m = base * static_cast<double>(ej);
                for (int l = 0; l < nvars_; ++l) {
                    const int el = term.mono[l];
                    if (!el) continue;
                    const int p = (l == j) ? el - 1 : el;
                    if (p) m *= ws.powers[static_cast<std::size_t>(l) * stride_ + p];
                }
                jac(static_cast<Eigen::Index>(i), j) += m;
            }
        }
    }
}

void Homotopy::dt(std::span<const Complex> y, double t, std::span<Complex> out,
                  Workspace& ws) const {
    prepare(t, true, ws);
    fill_powers(y, max_deg_, stride_, ws.powers);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < equations_.size(); ++i) {
        Complex sum = 0.0;
        for (const auto& term : equations_[i]) {
            const Complex blend =
                (1.0 - t) * gamma_ * term.generic_coeff + t * term.target_coeff;
            const Complex dblend = term.target_coeff - gamma_ * term.generic_coeff;
            Complex m = dblend * ws.tpow[idx] + blend * ws.dtpow[idx];
            ++idx;
            if (m != Complex(0.0, 0.0)) {
                for (int j = 0; j < nvars_; ++j) {
                    const int e = term.mono[j];
                    if (e) m *= ws.powers[static_cast<std::size_t>(j) * stride_ + e];
                }
            }
            sum += m;
        }
        out[i] = sum;
    }
}

// --- start systems --------------------------------------------------------

namespace {

// Common construction: one Homotopy equation list from the target plus a
// generic overlay support. Points present only in the overlay get
// target_coeff 0; points present only in the target get a fresh generic
// coefficient anyway (every support point needs one).
std::vector<std::vector<Homotopy::Term>> blended_equations(
    const PolySystem& target,
    const std::vector<std::vector<std::pair<Exponents, double>>>& lifted_exponents,
    RandomStream& rng) {
    std::vector<std::vector<Homotopy::Term>> eqs(target.size());
    for (int i = 0; i < target.size(); ++i) {
        const auto& poly = target.poly(i);
        std::map<Exponents, Complex> coeffs;
        for (std::size_t t = 0; t < poly.exponents().size(); ++t)
            coeffs[poly.exponents()[t]] = poly.coefficients()[t];
        for (const auto& [mono, e] : lifted_exponents[i]) {
            Homotopy::Term term;
            term.mono = mono;
            auto it = coeffs.find(mono);
            term.target_coeff = it == coeffs.end() ? Complex(0.0, 0.0) : it->second;
            term.generic_coeff = rng.unit_complex();
            term.t_exponent = e;
            eqs[i].push_back(std::move(term));
        }
    }
    return eqs;
}

class TotalDegreeStart final : public StartSystem {
public:
    TotalDegreeStart(const PolySystem& target, std::uint64_t seed,
                     unsigned long long budget) {
        if (!target.square())
            throw std::invalid_argument("total-degree start: system not square");
        const int n = target.nvars();
        unsigned long long td = target.total_degree();
        if (td > budget)
            throw std::runtime_error(
                "total-degree start: Bezout number " + std::to_string(td) +
                " exceeds the path budget " + std::to_string(budget));
        count_ = td;
        degrees_.resize(n);
        for (int i = 0; i < n; ++i) degrees_[i] = target.poly(i).degree();

        RandomStream rng(seed ^ 0x746f74616cULL);
        a_.resize(n);
        b_.resize(n);
        for (int i = 0; i < n; ++i) {
            a_[i] = rng.unit_complex();
            b_[i] = rng.unit_complex();
        }
        // start system overlay: support {x_i^{d_i}, 1} per equation, e = 0
        std::vector<std::vector<std::pair<Exponents, double>>> overlay(n);
        for (int i = 0; i < n; ++i) {
            Exponents pow(n, 0);
            pow[i] = degrees_[i];
            overlay[i].emplace_back(pow, 0.0);
            overlay[i].emplace_back(Exponents(n, 0), 0.0);
            for (const auto& mono : target.poly(i).support())
                overlay[i].emplace_back(mono, 0.0);
        }
        // kDrop duplicate overlay entries
        for (auto& eq : overlay) {
            std::sort(eq.begin(), eq.end());
            eq.erase(std::unique(eq.begin(), eq.end()), eq.end());
        }
        auto eqs = blended_equations(target, overlay, rng);
        // pin the generic coefficients of the start monomials to a, -b so
        // H(y,0) = gamma * (a_i y_i^{d_i} - b_i) exactly
        for (int i = 0; i < n; ++i) {
            Exponents pow(n, 0);
            pow[i] = degrees_[i];
            for (auto& term : eqs[i]) {
                if (term.mono == pow)
                    term.generic_coeff = a_[i];
                else if (exponents_degree(term.mono) == 0)
                    term.generic_coeff = -b_[i];
                else
                    term.generic_coeff = Complex(0.0, 0.0);  // pure linear blend
            }
        }
        homotopy_ = std::make_unique<Homotopy>(n, std::move(eqs), rng.unit_complex());
        // d_i-th roots of b_i/a_i
        roots_.resize(n);
        for (int i = 0; i < n; ++i) {
            Complex ratio = b_[i] / a_[i];
            double mod = std::pow(std::abs(ratio), 1.0 / degrees_[i]);
            double arg = std::arg(ratio) / degrees_[i];
            roots_[i].resize(degrees_[i]);
            for (int k = 0; k < degrees_[i]; ++k) {
                double phi = arg + 2.0 * 3.14159265358979323846 * k / degrees_[i];
                roots_[i][k] = mod * Complex(std::cos(phi), std::sin(phi));
            }
        }
    }

    unsigned long long path_count() const override { return count_; }
    const Homotopy& homotopy(unsigned long long) const override { return *homotopy_; }

    std::vector<Complex> start_point(unsigned long long index) const override {
        const int n = static_cast<int>(degrees_.size());
        std::vector<Complex> pt(n);
        unsigned long long rem = index;
        for (int i = 0; i < n; ++i) {
            pt[i] = roots_[i][rem % degrees_[i]];
            rem /= degrees_[i];
        }
        return pt;
    }

private:
    unsigned long long count_ = 0;
    std::vector<int> degrees_;
    std::vector<Complex> a_, b_;
    std::vector<std::vector<Complex>> roots_;
    std::unique_ptr<Homotopy> homotopy_;
};

// Smith normal form of an integer matrix: U V W = D with U, W unimodular.
struct Smith {
    std::vector<std::vector<long long>> u, w;
    std::vector<long long> diag;
};

Smith smith_normal_form(std::vector<std::vector<long long>> v) {
    const int n = static_cast<int>(v.size());
    const int m = n ? static_cast<int>(v[0].size()) : 0;
    Smith s;
    s.u.assign(n, std::vector<long long>(n, 0));
    s.w.assign(m, std::vector<long long>(m, 0));
    for (int i = 0; i < n; ++i) s.u[i][i] = 1;
    for (int j = 0; j < m; ++j) s.w[j][j] = 1;

    auto row_addmul = [&](std::vector<std::vector<long long>>& M, int dst, int src,
                          long long q) {
        for (std::size_t j = 0; j < M[dst].size(); ++j) M[dst][j] += q * M[src][j];
    };
    auto col_addmul = [&](std::vector<std::vector<long long>>& M, int dst, int src,
                          long long q) {
        for (auto& row : M) row[dst] += q * row[src];
    };
    auto col_swap = [&](std::vector<std::vector<long long>>& M, int a, int b) {
        for (auto& row : M) std::swap(row[a], row[b]);
    };

    int t = 0;
    while (t < std::min(n, m)) {
        // pivot: smallest nonzero magnitude in the remaining block
        int pi = -1, pj = -1;
        long long best = 0;
        for (int i = t; i < n; ++i)
            for (int j = t; j < m; ++j)
                if (v[i][j] != 0 &&
                    (pi < 0 || std::llabs(v[i][j]) < best)) {
                    best = std::llabs(v[i][j]);
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        std::swap(v[t], v[pi]);
        std::swap(s.u[t], s.u[pi]);
        col_swap(v, t, pj);
        col_swap(s.w, t, pj);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = t + 1; i < n; ++i) {
                if (v[i][t] == 0) continue;
                long long q = v[i][t] / v[t][t];
                if (q != 0) { row_addmul(v, i, t, -q); row_addmul(s.u, i, t, -q); }
                if (v[i][t] != 0) {
                    std::swap(v[t], v[i]);
                    std::swap(s.u[t], s.u[i]);
                    clean = false;
                }
            }
            for (int j = t + 1; j < m; ++j) {
                if (v[t][j] == 0) continue;
                long long q = v[t][j] / v[t][t];
                if (q != 0) { col_addmul(v, j, t, -q); col_addmul(s.w, j, t, -q); }
                if (v[t][j] != 0) {
                    col_swap(v, t, j);
                    col_swap(s.w, t, j);
                    clean = false;
                }
            }
        }
        ++t;
    }
    s.diag.resize(std::min(n, m));
    for (int i = 0; i < std::min(n, m); ++i) s.diag[i] = v[i][i];
    return s;
}

class PolyhedralStart final : public StartSystem {
public:
    PolyhedralStart(const PolySystem& target, std::uint64_t seed,
                    unsigned long long budget) {
        if (!target.square())
            throw std::invalid_argument("polyhedral start: system not square");
        const int n = target.nvars();
        MixedVolumeResult mv = mixed_volume(target, seed, /*keep_cells=*/true);
        if (mv.mixed_volume > budget)
            throw std::runtime_error(
                "polyhedral start: mixed volume " + std::to_string(mv.mixed_volume) +
                " exceeds the path budget " + std::to_string(budget));
        count_ = mv.mixed_volume;
        auto lifted = lift_supports(target.supports(), mv.lifting_seed);

        // generic coefficients and gamma are one deterministic stream
        RandomStream rng(seed ^ 0x706f6c79ULL);
        std::vector<std::vector<Complex>> generic(lifted.size());
        for (std::size_t i = 0; i < lifted.size(); ++i) {
            generic[i].resize(lifted[i].points.size());
            for (auto& g : generic[i]) g = rng.unit_complex();
        }
        Complex gamma = rng.unit_complex();

        // per-cell data; a global exponent scale keeps every cell on the
        // same deformation family (see ledger: per-cell scaling loses roots)
        double min_pos = std::numeric_limits<double>::infinity();
        cells_.reserve(mv.cells.size());
        for (const auto& cell : mv.cells) {
            CellData cd;
            cd.volume = static_cast<unsigned long long>(cell.volume);
            // cell normal: <a-b, alpha> = w_b - w_a over the n edges
            Eigen::MatrixXd A(n, n);
            Eigen::VectorXd rhs(n);
            for (int i = 0; i < n; ++i) {
                const auto& pts = lifted[i].points;
                const auto [ia, ib] = cell.edges[i];
                for (int j = 0; j < n; ++j) A(i, j) = pts[ia][j] - pts[ib][j];
                rhs(i) = lifted[i].lifts[ib] - lifted[i].lifts[ia];
            }
            Eigen::VectorXd alpha = A.fullPivLu().solve(rhs);
            cd.exponents.resize(n);
            for (int i = 0; i < n; ++i) {
                const auto& pts = lifted[i].points;
                const auto [ia, ib] = cell.edges[i];
                const double eta =
                    [&] {
                        double v = lifted[i].lifts[ia];
                        for (int j = 0; j < n; ++j) v += alpha(j) * pts[ia][j];
                        return v;
                    }();
                cd.exponents[i].resize(pts.size());
                for (std::size_t c = 0; c < pts.size(); ++c) {
                    double v = lifted[i].lifts[c];
                    for (int j = 0; j < n; ++j) v += alpha(j) * pts[c][j];
                    double e = v - eta;
                    if (c == static_cast<std::size_t>(ia) ||
                        c == static_cast<std::size_t>(ib))
                        e = 0.0;  // exact on the cell edge
                    if (e < 0.0) e = 0.0;  // roundoff guard; true negatives
                                           // cannot occur for a fine cell
                    cd.exponents[i][c] = e;
                    if (e > 0.0) min_pos = std::min(min_pos, e);
                }
            }
            cd.edges = cell.edges;
            cells_.push_back(std::move(cd));
        }
        const double scale =
            (std::isfinite(min_pos) && min_pos < 1.0) ? 1.0 / min_pos : 1.0;

        // homotopies and start-point factorizations per cell
        unsigned long long offset = 0;
        for (auto& cd : cells_) {
            std::vector<std::vector<std::pair<Exponents, double>>> overlay(n);
            for (int i = 0; i < n; ++i) {
                const auto& pts = lifted[i].points;
                overlay[i].reserve(pts.size());
                for (std::size_t c = 0; c < pts.size(); ++c)
                    overlay[i].emplace_back(pts[c], cd.exponents[i][c] * scale);
            }
            RandomStream dummy(0);  // coefficients overwritten below
            auto eqs = blended_equations(target, overlay, dummy);
            for (int i = 0; i < n; ++i)
                for (std::size_t c = 0; c < eqs[i].size(); ++c) {
                    // overlay order follows lifted[i].points order
                    eqs[i][c].generic_coeff = generic[i][c];
                }
            cd.homotopy = std::make_shared<Homotopy>(n, std::move(eqs), gamma);

            // binomial start: y^{a-b} = -g_b/g_a, solved via Smith form
            std::vector<std::vector<long long>> vmat(n, std::vector<long long>(n));
            std::vector<Complex> beta(n);
            for (int i = 0; i < n; ++i) {
                const auto& pts = lifted[i].points;
                const auto [ia, ib] = cd.edges[i];
                for (int j = 0; j < n; ++j) vmat[i][j] = pts[ia][j] - pts[ib][j];
                beta[i] = -generic[i][ib] / generic[i][ia];
            }
            Smith sm = smith_normal_form(vmat);
            for (long long d : sm.diag)
                if (d == 0)
                    throw std::logic_error(
                        "polyhedral start: singular edge matrix in a fine cell");
            cd.smith = std::move(sm);
            cd.beta = std::move(beta);
            cd.first_path = offset;
            offset += cd.volume;
        }
        if (offset != count_)
            throw std::logic_error("polyhedral start: volume bookkeeping mismatch");
        lifting_seed_ = mv.lifting_seed;
    }

    unsigned long long path_count() const override { return count_; }
    std::uint64_t lifting_seed() const { return lifting_seed_; }

    const Homotopy& homotopy(unsigned long long index) const override {
        return *cells_[cell_of(index)].homotopy;
    }

    std::vector<Complex> start_point(unsigned long long index) const override {
        const auto& cd = cells_[cell_of(index)];
        const int n = static_cast<int>(cd.smith.diag.size());
        unsigned long long local = index - cd.first_path;
        // gamma_i = prod_j beta_j^{U_ij}; z_i = |d_i|-th root branch; y = z^W
        std::vector<Complex> z(n);
        for (int i = 0; i < n; ++i) {
            double lmod = 0.0, larg = 0.0;
            for (int j = 0; j < n; ++j) {
                long long u = cd.smith.u[i][j];
                if (u == 0) continue;
                lmod += u * std::log(std::abs(cd.beta[j]));
                larg += u * std::arg(cd.beta[j]);
            }
            long long d = cd.smith.diag[i];
            if (d < 0) { lmod = -lmod; larg = -larg; d = -d; }
            unsigned long long branch = local % static_cast<unsigned long long>(d);
            local /= static_cast<unsigned long long>(d);
            double mod = std::exp(lmod / d);
            double arg = (larg + 2.0 * 3.14159265358979323846 *
                                     static_cast<double>(branch)) /
                         static_cast<double>(d);
            z[i] = mod * Complex(std::cos(arg), std::sin(arg));
        }
        std::vector<Complex> y(n, Complex(1.0, 0.0));
        for (int j = 0; j < n; ++j) {
            Complex v = 1.0;
            for (int i = 0; i < n; ++i) {
                long long wj = cd.smith.w[j][i];
                if (wj == 0) continue;
                // z_i^{w} with integer w
                double lm = wj * std::log(std::abs(z[i]));
                double la = wj * std::arg(z[i]);
                v *= std::exp(lm) * Complex(std::cos(la), std::sin(la));
            }
            y[j] = v;
        }
        return y;
    }

private:
    struct CellData {
        std::vector<std::pair<int, int>> edges;
        std::vector<std::vector<double>> exponents;  // per support, per point
        unsigned long long volume = 0;
        unsigned long long first_path = 0;
        std::shared_ptr<Homotopy> homotopy;
        Smith smith;
        std::vector<Complex> beta;
    };

    std::size_t cell_of(unsigned long long index) const {
        std::size_t lo = 0, hi = cells_.size();
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cells_[mid].first_path <= index) lo = mid; else hi = mid;
        }
        return lo;
    }

    unsigned long long count_ = 0;
    std::uint64_t lifting_seed_ = 0;
    std::vector<CellData> cells_;
};

}  // namespace

std::unique_ptr<StartSystem> build_total_degree_start(const PolySystem& target,
                                                      std::uint64_t seed,
                                                      unsigned long long budget) {
    return std::make_unique<TotalDegreeStart>(target, seed, budget);
}

std::unique_ptr<StartSystem> build_polyhedral_start(const PolySystem& target,
                                                    std::uint64_t seed,
                                                    unsigned long long budget) {
    return std::make_unique<PolyhedralStart>(target, seed, budget);
}

// --- tracking -------------------------------------------------------------

namespace {

double inf_norm(std::span<const Complex> v) {
    double m = 0.0;
    for (const Complex& c : v) m = std::max(m, std::abs(c));
    return m;
}

bool all_finite(std::span<const Complex> v) {
    for (const Complex& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// Endpoint refinement on the target plus residual/condition reporting.
// Convergence scale: absolute tolerance relaxed by the term-magnitude sum so
// large-coordinate roots are judged by backward error.
struct Refined {
    bool ok = false;
    std::vector<Complex> point;
    double residual = 0.0;
    double condition = 0.0;
};

Refined refine_endpoint(const PolySystem& target, std::vector<Complex> y,
                        const TrackerOptions& opts, EvalWorkspace& ws) {
    const int n = target.nvars();
    Refined out;
    Eigen::MatrixXcd jac(n, n);
    std::vector<Complex> res(n);
    Eigen::VectorXcd rv(n), step(n);
    double magscale = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    bool have_lu = false;
    for (int it = 0; it <= opts.max_endpoint_iters; ++it) {
        target.eval(y, res, ws);
        if (!all_finite(res)) return out;
        double rnorm = inf_norm(res);
        // magnitude of the largest term sum for backward-error scaling
        magscale = 1.0;
        for (int i = 0; i < n; ++i) {
            const auto& p = target.poly(i);
            double s = 0.0;
            for (std::size_t t = 0; t < p.exponents().size(); ++t) {
                double m = std::abs(p.coefficients()[t]);
                const auto& e = p.exponents()[t];
                for (int j = 0; j < n; ++j)
                    for (int q = 0; q < e[j]; ++q) m *= std::abs(y[j]);
                s += m;
            }
            magscale = std::max(magscale, s);
        }
        if (rnorm <= opts.endpoint_tol * magscale) {
            out.ok = true;
            out.residual = rnorm;
            break;
        }
        if (it == opts.max_endpoint_iters) {
            out.residual = rnorm;
            break;
        }
        target.jacobian_eval(y, jac, ws);
        lu.compute(jac);
        have_lu = true;
        for (int i = 0; i < n; ++i) rv(i) = res[i];
        step = lu.solve(rv);
        if (!step.allFinite()) return out;
        for (int i = 0; i < n; ++i) y[i] -= step(i);
        if (!all_finite(y)) return out;
    }
    if (!out.ok) return out;
    // condition estimate: kappa_inf via explicit inverse (systems are small)
    target.jacobian_eval(y, jac, ws);
    lu.compute(jac);
    (void)have_lu;
    Eigen::MatrixXcd inv = lu.inverse();
    double jn = 0.0, in = 0.0;
    for (int i = 0; i < n; ++i) {
        double r1 = 0.0, r2 = 0.0;
        for (int j = 0; j < n; ++j) {
            r1 += std::abs(jac(i, j));
            r2 += std::abs(inv(i, j));
        }
        jn = std::max(jn, r1);
        in = std::max(in, r2);
    }
    out.condition = jn * in;
    if (!std::isfinite(out.condition)) {
        out.ok = false;
        return out;
    }
    out.point = std::move(y);
    return out;
}

}  // namespace

PathResult track_path(const Homotopy& h, std::span<const Complex> start,
                      const PolySystem& target, const TrackerOptions& opts) {
    opts.validate();
    const int n = h.nvars();
    PathResult result;
    Homotopy::Workspace hws;
    EvalWorkspace ews;

    std::vector<Complex> y(start.begin(), start.end());
    std::vector<Complex> res(n), ytmp(n);
    Eigen::MatrixXcd jac(n, n);
    Eigen::VectorXcd rhs(n), k1(n), k2(n), k3(n), k4(n), corr(n);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;

    double t = 0.0;
    double step = opts.initial_step;
    int steps = 0;
    const long max_steps = 100000;

    // dy/dt = -J^-1 H_t
    auto velocity = [&](std::span<const Complex> yy, double tt,
                        Eigen::VectorXcd& out) -> bool {
        h.jacobian(yy, tt, jac, hws);
        h.dt(yy, tt, res, hws);
        lu.compute(jac);
        for (int i = 0; i < n; ++i) rhs(i) = res[i];
        out = lu.solve(-rhs);
        return out.allFinite();
    };

    // `strict` endgames (step underflow short of t=1) only accept a refined
    // endpoint close to where the path already was; paths crawling toward
    // infinity must not be teleported into some unrelated Newton basin.
    auto finish = [&](std::vector<Complex> point, bool strict) {
        result.t_reached = t;
        result.final_norm = inf_norm(point);
        std::vector<Complex> before = point;
        Refined r = refine_endpoint(target, std::move(point), opts, ews);
        if (r.ok && strict) {
            double disp = 0.0, scale = 1.0;
            for (int i = 0; i < n; ++i) {
                disp = std::max(disp, std::abs(r.point[i] - before[i]));
                scale = std::max(scale, std::abs(before[i]));
            }
            if (disp > 0.05 * scale) r.ok = false;
        }
        if (r.ok) {
            result.status = PathStatus::kConverged;
            result.endpoint = std::move(r.point);
            result.residual = r.residual;
            result.condition_estimate = r.condition;
        } else {
            result.status = PathStatus::kFailed;
        }
        result.steps_taken = steps;
        return result;
    };

    while (t < 1.0) {
        if (++steps > max_steps) {
            result.status = PathStatus::kFailed;
            result.steps_taken = steps;
            result.t_reached = t;
            result.final_norm = inf_norm(y);
            return result;
        }
        double hstep = std::min(step, 1.0 - t);
        bool ok = true;
        // RK4 predictor on the Davidenko equation
        ok = velocity(y, t, k1);
        if (ok) {
            for (int i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * hstep * k1(i);
            ok = velocity(ytmp, t + 0.5 * hstep, k2);
        }
        if (ok) {
            for (int i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * hstep * k2(i);
            ok = velocity(ytmp, t + 0.5 * hstep, k3);
        }
        if (ok) {
            for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hstep * k3(i);
            ok = velocity(ytmp, t + hstep, k4);
        }
        double pred_disp = 0.0;
        if (ok) {
            for (int i = 0; i < n; ++i) {
                Complex dy = hstep / 6.0 * (k1(i) + 2.0 * k2(i) + 2.0 * k3(i) + k4(i));
                ytmp[i] = y[i] + dy;
                pred_disp = std::max(pred_disp, std::abs(dy));
            }
            ok = all_finite(ytmp);
        }
        // Newton corrector at fixed t + hstep; reject when the correction is
        // out of proportion to the prediction (path-jump guard)
        if (ok) {
            const double tc = t + hstep;
            bool conv = false;
            double corr_total = 0.0;
            for (int it = 0; it < opts.max_corrector_iters; ++it) {
                h.eval(ytmp, tc, res, hws);
                if (!all_finite(res)) { ok = false; break; }
                if (inf_norm(res) < opts.corrector_tol) { conv = true; break; }
                h.jacobian(ytmp, tc, jac, hws);
                lu.compute(jac);
                for (int i = 0; i < n; ++i) rhs(i) = res[i];
                corr = lu.solve(rhs);
                if (!corr.allFinite()) { ok = false; break; }
                double cn = 0.0;
                for (int i = 0; i < n; ++i) {
                    ytmp[i] -= corr(i);
                    cn = std::max(cn, std::abs(corr(i)));
                }
                corr_total += cn;
            }
            if (ok && !conv) {
                h.eval(ytmp, tc, res, hws);
                conv = all_finite(res) && inf_norm(res) < opts.corrector_tol;
            }
            if (conv && corr_total > std::max(0.5 * pred_disp, 1e-7)) conv = false;
            ok = ok && conv;
        }
        if (ok) {
            y = ytmp;
            t += hstep;
            step = std::min(step * 2.0, opts.initial_step);
            double yn = inf_norm(y);
            if (yn > opts.divergence_norm) {
                result.status = PathStatus::kDiverged;
                result.steps_taken = steps;
                result.t_reached = t;
                result.final_norm = yn;
                return result;
            }
        } else {
            step *= 0.5;
            if (step < opts.min_step) {
                if (t >= 1.0 - 1e-6) return finish(std::move(y), /*strict=*/true);
                result.status = PathStatus::kFailed;
                result.steps_taken = steps;
                result.t_reached = t;
                result.final_norm = inf_norm(y);
                return result;
            }
        }
    }
    return finish(std::move(y), /*strict=*/false);
}

// --- solution sets --------------------------------------------------------

bool endpoint_less(std::span<const Complex> a, std::span<const Complex> b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return a.size() < b.size();
}

std::vector<SolutionRecord> dedup_records(std::vector<SolutionRecord> records,
                                          double tol) {
    std::sort(records.begin(), records.end(),
              [](const SolutionRecord& x, const SolutionRecord& y) {
                  return endpoint_less(x.endpoint, y.endpoint);
              });
    std::vector<SolutionRecord> out;
    for (auto& rec : records) {
        bool dup = false;
        // sorted by first coordinate: only a bounded window can collide
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (rec.endpoint[0].real() - it->endpoint[0].real() > tol) break;
            double dist = 0.0;
            for (std::size_t i = 0; i < rec.endpoint.size(); ++i)
                dist = std::max(dist, std::abs(rec.endpoint[i] - it->endpoint[i]));
            if (dist < tol) {
                dup = true;
                if (rec.residual < it->residual) *it = rec;
                break;
            }
        }
        if (!dup) out.push_back(std::move(rec));
    }
    return out;
}

SolutionSet solve_all(const PolySystem& target, SolveMethod method,
                      std::uint64_t seed, const SolveOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    std::unique_ptr<StartSystem> source =
        method == SolveMethod::kTotalDegree
            ? build_total_degree_start(target, seed, opts.path_budget)
            : build_polyhedral_start(target, seed, opts.path_budget);

    JobSpec spec;
    spec.chunk_size = opts.chunk_size;
    spec.worker_count = opts.workers;
    spec.checkpoint_path = opts.checkpoint_path;
    spec.resume = opts.resume;
    spec.path_budget = opts.path_budget;
    spec.progress = opts.progress;
    spec.seed = seed;
    spec.method_tag = method == SolveMethod::kTotalDegree ? 1 : 2;

    JobResult job = run_job(spec, target, *source, opts.tracker);

    // Re-track colliding converged endpoints with tighter settings under the
    // same deformation: distinct regular paths cannot share an endpoint, so
    // a collision marks numerical path jumping.
    for (int round = 0; round < opts.collision_retrack_rounds; ++round) {
        std::vector<std::size_t> order(job.converged.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return endpoint_less(job.converged[x].record.endpoint,
                                 job.converged[y].record.endpoint);
        });
        std::vector<std::size_t> colliders;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            const auto& a = job.converged[order[k]].record.endpoint;
            const auto& b = job.converged[order[k + 1]].record.endpoint;
            double dist = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                dist = std::max(dist, std::abs(a[i] - b[i]));
            if (dist < opts.dedup_tol) {
                colliders.push_back(order[k]);
                colliders.push_back(order[k + 1]);
            }
        }
        std::sort(colliders.begin(), colliders.end());
        colliders.erase(std::unique(colliders.begin(), colliders.end()),
                        colliders.end());
        if (colliders.empty()) break;
        TrackerOptions tight = opts.tracker;
        for (int r = 0; r <= round; ++r) {
            tight.initial_step /= 5.0;
            tight.corrector_tol /= 10.0;
            tight.min_step = std::min(tight.min_step, 1e-10);
            tight.max_corrector_iters = std::max(1, tight.max_corrector_iters - 1);
        }
        for (std::size_t ci : colliders) {
            unsigned long long pi = job.converged[ci].path_index;
            auto start = source->start_point(pi);
            PathResult pr = track_path(source->homotopy(pi), start, target, tight);
            job.stats.retracked++;
            if (pr.status == PathStatus::kConverged) {
                job.converged[ci].record.endpoint = pr.endpoint;
                job.converged[ci].record.residual = pr.residual;
                job.converged[ci].record.condition = pr.condition_estimate;
            } else {
                // tighter tracking demoted it; drop from converged
                job.converged[ci].record.endpoint.clear();
                if (pr.status == PathStatus::kDiverged) {
                    job.stats.converged--;
                    job.stats.diverged++;
                } else {
                    job.stats.converged--;
                    job.stats.failed++;
                }
            }
        }
        job.converged.erase(
            std::remove_if(job.converged.begin(), job.converged.end(),
                           [](const PathRecord& r) { return r.record.endpoint.empty(); }),
            job.converged.end());
    }

    SolutionSet set;
    set.dedup_tol = opts.dedup_tol;
    std::vector<SolutionRecord> recs;
    recs.reserve(job.converged.size());
    for (auto& pr : job.converged) recs.push_back(std::move(pr.record));
    set.records = dedup_records(std::move(recs), opts.dedup_tol);
    set.stats = job.stats;
    set.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return set;
}

}  // namespace nbcc
