// Filtering complex endpoints to real, then physical solutions; dimension
// detection via Cayley-Menger determinants; grouping into S_n symmetry
// orbits with isotropy counts.

#pragma once

#include <span>
#include <vector>

#include "nbcc/tracker.hpp"

namespace nbcc {

struct RealnessPolicy {
    double theta = 1e-7;  // threshold on |imaginary part|
};

/// A real solution of the full 2k-variable system after real Newton
/// refinement.
struct RealSolution {
    std::vector<double> point;
    double residual = 0.0;
    double condition = 0.0;
};

/// Keeps endpoints whose imaginary parts all stay below theta, drops the
/// imaginary parts, and Newton-refines on the real system.
std::vector<RealSolution> filter_real(const SolutionSet& solutions,
                                      const PolySystem& system,
                                      const RealnessPolicy& policy = {});

struct PhysicalSolution {
    std::vector<double> distances;       // the k distance coordinates
    std::vector<double> full_point;      // all 2k coordinates
    double residual = 0.0;
    double condition = 0.0;
    bool certified = false;
};

/// Keeps real solutions whose distance variables are all strictly positive.
/// `n` is the body count (the first n(n-1)/2 coordinates are distances).
std::vector<PhysicalSolution> filter_physical(const std::vector<RealSolution>& real,
                                              int n);

/// Smallest dimension d (1..n-1) such that every Cayley-Menger determinant
/// of every (d+2)-point subset vanishes within the scale-aware tolerance
/// |det| < tol * (max distance)^{2(k-1)} for a k-point determinant. Throws
/// on distance data that is not embeddable in any dimension.
int cm_dimension(std::span<const double> distances, int n, double tol = 1e-8);

/// The Cayley-Menger determinant of an m-point subset (for tests and the
/// dimension cascade).
double cayley_menger_det(std::span<const double> distances, int n,
                         std::span<const int> subset);

struct ConfigurationClass {
    std::vector<double> representative;  // canonical (lex-min over S_n) distances
    int dimension = 0;
    int isotropy_order = 0;
    int orbit_size = 0;   // n! / isotropy_order
    int member_count = 0;
    double residual = 0.0;      // representative's
    double condition = 0.0;     // representative's
    bool certified = false;
};

/// Groups physical solutions into S_n orbits: canonical form is the
/// lexicographic minimum over all permutations acting by (i,j) -> (si,sj);
/// solutions sharing a canonical form within match_tol form one class.
/// Throws if members of one class disagree on isotropy order (tolerance
/// misconfiguration).
std::vector<ConfigurationClass> orbit_classify(
    const std::vector<PhysicalSolution>& physical, int n, double match_tol = 1e-6);

/// The permutation action on distance vectors: out[idx(si,sj)] = d[idx(i,j)].
std::vector<double> permute_distances(std::span<const double> distances, int n,
                                      std::span<const int> perm);

/// Lexicographic minimum of the distance vector over all n! relabelings.
std::vector<double> canonical_distances(std::span<const double> distances, int n);

}  // namespace nbcc
