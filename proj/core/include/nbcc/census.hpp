// One-shot pipeline tying everything together: solve (or seed), filter,
// certify, classify, embed, and report.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbcc/acsys.hpp"
#include "nbcc/classify.hpp"
#include "nbcc/embed.hpp"
#include "nbcc/tracker.hpp"

namespace nbcc {

struct CensusOptions {
    SolveMethod method = SolveMethod::kPolyhedral;
    std::uint64_t seed = 1;
    double theta = 1e-7;           // realness threshold
    double certify_radius = 1e-8;  // Krawczyk box radius
    double lambda_prime = -1.0;
    unsigned long long path_budget = 4'000'000;
    bool allow_huge = false;  // required for n >= 5 exhaustive runs
    int workers = 1;
    unsigned long long chunk_size = 1024;
    std::string checkpoint_path;
    bool resume = false;
    bool progress = false;
};

/// Thrown when an exhaustive run would trace a cluster-scale path count and
/// the caller did not explicitly allow it.
struct BudgetRefusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClassEntry {
    std::string name;
    ConfigurationClass cls;
    Embedding embedding;
    double krawczyk_margin = 0.0;
};

struct CensusReport {
    int bodies = 0;
    std::vector<double> masses;
    std::string method;  // "polyhedral" | "total-degree" | "seeded"
    bool seeded = false;
    std::uint64_t seed = 0;
    double theta = 0.0;
    double certify_radius = 0.0;
    double lambda_prime = -1.0;
    std::string rigor_mechanism;
    SolveStatistics path_stats;
    unsigned long long paths_traced = 0;
    int real_count = 0;      // after the realness filter (exhaustive mode)
    int physical_count = 0;  // sum of member counts
    double max_residual = 0.0;
    double max_condition = 0.0;
    bool all_certified = false;
    std::vector<ClassEntry> classes;

    /// Counts cross-foot: the per-class member counts sum to physical_count.
    bool crossfoot_ok() const;
};

/// Exhaustive census: solve every path, filter to physical solutions,
/// refine them in distance space, certify each with Krawczyk, classify into
/// orbits, reconstruct coordinates. Refuses bodies >= 5 in exhaustive mode
/// unless allow_huge is set.
CensusReport census(const MassVector& masses, const CensusOptions& opts = {});

/// Seeded five-body census: constructs the ten known equal-mass classes from
/// their symmetry ansatze, refines, certifies, classifies, and verifies the
/// orbit counts. Throws (naming the class) if any class fails refinement,
/// certification, or its expected counts.
CensusReport seeded_census_five(const CensusOptions& opts = {});

/// Aligned-text table mirroring the collinear / planar / spatial /
/// four-dimensional grouping.
std::string render_census_table(const CensusReport& report);

}  // namespace nbcc
