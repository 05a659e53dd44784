// Homotopy construction (total-degree and polyhedral), predictor-corrector
// path tracking, endpoint refinement, and full-system solving.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nbcc/mixedcells.hpp"
#include "nbcc/poly.hpp"

namespace nbcc {

enum class SolveMethod { kTotalDegree, kPolyhedral };

struct TrackerOptions {
    double initial_step = 0.05;
    double min_step = 1e-8;
    double corrector_tol = 1e-9;
    int max_corrector_iters = 3;
    double divergence_norm = 1e14;
    double endpoint_tol = 1e-12;
    int max_endpoint_iters = 30;

    void validate() const;
};

enum class PathStatus { kConverged, kDiverged, kFailed };

struct PathResult {
    PathStatus status = PathStatus::kFailed;
    std::vector<Complex> endpoint;
    double residual = 0.0;            // infinity norm of the target at the endpoint
    double condition_estimate = 0.0;  // kappa_inf of the target Jacobian there
    int steps_taken = 0;
    double t_reached = 0.0;    // how far along the deformation the path got
    double final_norm = 0.0;   // |y|_inf where tracking stopped
};

/// One homotopy in blended-coefficient form,
///   H_i(y,t) = sum_a [(1-t) gamma g_a + t p_a] y^a t^{e_a},
/// where p are the target coefficients, g generic unit-modulus coefficients,
/// and e_a >= 0 the lifting exponents (identically zero in total-degree
/// mode). H(y,0) = gamma * (start system), H(y,1) = target exactly.
class Homotopy {
public:
    struct Term {
        Exponents mono;
        Complex target_coeff;   // p_a
        Complex generic_coeff;  // g_a
        double t_exponent;      // e_a
    };

    Homotopy(int nvars, std::vector<std::vector<Term>> equations, Complex gamma);

    int nvars() const { return nvars_; }
    Complex gamma() const { return gamma_; }

    /// Scratch for one tracking thread.
    struct Workspace {
        std::vector<Complex> powers;      // variable power table
        std::vector<double> tpow;         // per-term t^{e_a}
        std::vector<double> dtpow;        // per-term d/dt t^{e_a}
        double prepared_t = -1.0;
        bool prepared_deriv = false;
    };

    void prepare(double t, bool with_derivative, Workspace& ws) const;
    void eval(std::span<const Complex> y, double t, std::span<Complex> out,
              Workspace& ws) const;
    void jacobian(std::span<const Complex> y, double t, Eigen::MatrixXcd& jac,
                  Workspace& ws) const;
    void dt(std::span<const Complex> y, double t, std::span<Complex> out,
            Workspace& ws) const;

    const std::vector<std::vector<Term>>& equations() const { return equations_; }

private:
    int nvars_;
    Complex gamma_;
    std::vector<std::vector<Term>> equations_;
    std::vector<int> max_deg_;
    int stride_ = 1;
};

/// Start system data: the homotopy plus an indexed family of start points.
/// Start points are enumerated lazily by index so a large run never holds
/// them all in memory and work can be chunked deterministically.
class StartSystem {
public:
    virtual ~StartSystem() = default;
    virtual unsigned long long path_count() const = 0;
    virtual const Homotopy& homotopy(unsigned long long path_index) const = 0;
    virtual std::vector<Complex> start_point(unsigned long long path_index) const = 0;
};

/// Total-degree start: a_j x_j^{d_j} - b_j with random unit-modulus a, b.
/// Throws if the Bezout number exceeds `budget`.
std::unique_ptr<StartSystem> build_total_degree_start(const PolySystem& target,
                                                      std::uint64_t seed,
                                                      unsigned long long budget);

/// Polyhedral start over the fine mixed cells of a random lifting of the
/// target supports. One binomial system per cell, solved in closed form by
/// Smith normal form; cell volumes sum to the path count.
std::unique_ptr<StartSystem> build_polyhedral_start(const PolySystem& target,
                                                    std::uint64_t seed,
                                                    unsigned long long budget);

PathResult track_path(const Homotopy& h, std::span<const Complex> start,
                      const PolySystem& target, const TrackerOptions& opts);

// --- solution sets --------------------------------------------------------

struct SolutionRecord {
    std::vector<Complex> endpoint;
    double residual = 0.0;
    double condition = 0.0;
    PathStatus status = PathStatus::kConverged;
};

struct SolveStatistics {
    unsigned long long attempted = 0;
    unsigned long long converged = 0;
    unsigned long long diverged = 0;
    unsigned long long failed = 0;
    unsigned long long retracked = 0;  // failure retries + collision re-tracks
    double seconds = 0.0;
};

struct SolutionSet {
    std::vector<SolutionRecord> records;  // deduplicated, canonically sorted
    double dedup_tol = 1e-6;
    SolveStatistics stats;
};

/// Canonical coordinate order used everywhere results are merged, so output
/// is reproducible regardless of scheduling.
bool endpoint_less(std::span<const Complex> a, std::span<const Complex> b);

/// Deduplicate converged records within tol (infinity norm), keeping the
/// smallest-residual representative of each cluster.
std::vector<SolutionRecord> dedup_records(std::vector<SolutionRecord> records,
                                          double tol);

struct SolveOptions {
    TrackerOptions tracker;
    double dedup_tol = 1e-6;
    unsigned long long path_budget = 4'000'000;
    int workers = 1;
    int collision_retrack_rounds = 3;
    std::string checkpoint_path;  // empty: no checkpointing
    bool resume = false;
    bool progress = false;  // chunk completion lines on stderr
    unsigned long long chunk_size = 1024;
};

/// Traces every start point of the chosen method, refines endpoints on the
/// target, re-tracks colliding converged paths (two regular paths cannot
/// legally share an endpoint), and returns the deduplicated set.
SolutionSet solve_all(const PolySystem& target, SolveMethod method,
                      std::uint64_t seed, const SolveOptions& opts = {});

}  // namespace nbcc
