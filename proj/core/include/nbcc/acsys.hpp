// The Albouy-Chenciner distance equations for n bodies: polynomial system
// construction, direct residual evaluation on distance vectors, and damped
// Newton refinement in distance space.

#pragma once

#include <span>
#include <vector>

#include "nbcc/poly.hpp"

namespace nbcc {

struct MassVector {
    std::vector<double> masses;

    int n() const { return static_cast<int>(masses.size()); }
    static MassVector equal(int n) { return {std::vector<double>(n, 1.0)}; }
    void validate() const;
};

/// Pair order for the distance variables: (i,j) with 0 <= i < j < n,
/// lexicographic. All distance vectors in this project use this layout.
struct DistanceIndexing {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;

    static DistanceIndexing make(int n);
    int count() const { return static_cast<int>(pairs.size()); }
    int index(int i, int j) const;  // unordered lookup
};

/// The polynomialized square system: 2k variables (k distance variables
/// r_ij, then k auxiliary variables s_ij tied to the inverse cubes by the
/// constraint block), k cubic distance equations + k quartic constraints.
struct ACSystem {
    int n = 0;
    double lambda_prime = -1.0;
    DistanceIndexing indexing;
    PolySystem system;

    /// Embeds a positive distance vector into the full variable space
    /// (appends the matching s values).
    std::vector<Complex> lift_distances(std::span<const double> distances) const;
    std::vector<double> lift_distances_real(std::span<const double> distances) const;
};

ACSystem build_ac_system(const MassVector& masses, double lambda_prime = -1.0);

/// The k left-hand sides of the distance equations evaluated directly on a
/// strictly positive distance vector, with S_ij = r_ij^-3 + lambda_prime.
/// No auxiliary variables involved.
std::vector<double> ac_residual(std::span<const double> distances,
                                const MassVector& masses,
                                double lambda_prime = -1.0);

struct NewtonRefineResult {
    std::vector<double> distances;
    bool converged = false;
    double residual = 0.0;  // final infinity norm
    int iterations = 0;
};

/// Damped Newton on ac_residual with the square Jacobian in the distance
/// variables only. A singular Jacobian reports non-convergence.
NewtonRefineResult newton_refine(std::span<const double> distances,
                                 const MassVector& masses, double tol = 1e-14,
                                 int max_iter = 60, double lambda_prime = -1.0);

}  // namespace nbcc
