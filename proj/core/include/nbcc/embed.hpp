// Cartesian coordinate reconstruction from a mutual-distance vector by
// double-centering to a Gram matrix and taking its top spectral factors.

#pragma once

#include <span>
#include <vector>

namespace nbcc {

struct Embedding {
    int dimension = 0;
    std::vector<std::vector<double>> coordinates;  // n points in R^dimension
    double max_distance_error = 0.0;
};

/// Reconstructs n points in the given dimension. The centroid sits at the
/// origin; axis signs are fixed by the first point with a nonzero component
/// on each axis. Throws when the distance data is not Euclidean at this
/// dimension (large negative eigenvalue, or mass beyond the top-d factors).
Embedding reconstruct(std::span<const double> distances, int n, int dimension);

/// Count of Gram eigenvalues above tol * (largest eigenvalue); an
/// independent check of the Cayley-Menger dimension.
int spectral_dimension(std::span<const double> distances, int n, double tol = 1e-8);

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations; returns eigenvalues descending with matching eigenvectors in
/// the columns. Exposed for tests.
void jacobi_eigen_symmetric(std::vector<std::vector<double>> a,
                            std::vector<double>& eigenvalues,
                            std::vector<std::vector<double>>& eigenvectors);

}  // namespace nbcc
