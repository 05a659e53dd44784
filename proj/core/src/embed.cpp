#include "nbcc/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nbcc/acsys.hpp"

namespace nbcc {

void jacobi_eigen_symmetric(std::vector<std::vector<double>> a,
                            std::vector<double>& eigenvalues,
                            std::vector<std::vector<double>>& eigenvectors) {
    const int n = static_cast<int>(a.size());
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    double vip = eigenvectors[i][p], viq = eigenvectors[i][q];
                    eigenvectors[i][p] = c * vip - s * viq;
                    eigenvectors[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
    // sort descending, carrying the eigenvector columns along
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return eigenvalues[x] > eigenvalues[y]; });
    std::vector<double> ev(n);
    std::vector<std::vector<double>> vec(n, std::vector<double>(n));
    for (int j = 0; j < n; ++j) {
        ev[j] = eigenvalues[order[j]];
        for (int i = 0; i < n; ++i) vec[i][j] = eigenvectors[i][order[j]];
    }
    eigenvalues = std::move(ev);
    eigenvectors = std::move(vec);
}

namespace {

// double-centered Gram matrix from squared distances
std::vector<std::vector<double>> gram_matrix(std::span<const double> distances, int n) {
    auto indexing = DistanceIndexing::make(n);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double d = distances[indexing.index(i, j)];
            m[i][j] = -0.5 * d * d;
        }
    // G = J M J with J = I - 11^T/n
    std::vector<double> row_mean(n, 0.0), col_mean(n, 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            row_mean[i] += m[i][j] / n;
            col_mean[j] += m[i][j] / n;
            total += m[i][j] / (static_cast<double>(n) * n);
        }
    std::vector<std::vector<double>> g(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g[i][j] = m[i][j] - row_mean[i] - col_mean[j] + total;
    return g;
}

}  // namespace

Embedding reconstruct(std::span<const double> distances, int n, int dimension) {
    if (dimension < 1 || dimension > n - 1)
        throw std::invalid_argument("reconstruct: dimension out of range");
    auto g = gram_matrix(distances, n);
    std::vector<double> ev;
    std::vector<std::vector<double>> vec;
    jacobi_eigen_symmetric(g, ev, vec);

    const double lead = std::max(ev[0], 0.0);
    const double rank_tol = 1e-7;
    if (ev[n - 1] < -rank_tol * std::max(lead, 1.0))
        throw std::runtime_error("reconstruct: distance data not Euclidean "
                                 "(negative Gram eigenvalue)");
    if (dimension < n - 1 && ev[dimension] > rank_tol * std::max(lead, 1.0))
        throw std::runtime_error("reconstruct: Gram mass beyond the requested "
                                 "dimension");

    Embedding out;
    out.dimension = dimension;
    out.coordinates.assign(n, std::vector<double>(dimension, 0.0));
    for (int d = 0; d < dimension; ++d) {
        double s = std::sqrt(std::max(ev[d], 0.0));
        for (int i = 0; i < n; ++i) out.coordinates[i][d] = s * vec[i][d];
    }
    // sign convention: first point with a nonzero component fixes each axis
    for (int d = 0; d < dimension; ++d) {
        for (int i = 0; i < n; ++i) {
            if (std::abs(out.coordinates[i][d]) > 1e-9) {
                if (out.coordinates[i][d] < 0.0)
                    for (int l = 0; l < n; ++l) out.coordinates[l][d] *= -1.0;
                break;
            }
        }
    }
    auto indexing = DistanceIndexing::make(n);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int d = 0; d < dimension; ++d) {
                double diff = out.coordinates[i][d] - out.coordinates[j][d];
                s += diff * diff;
            }
            err = std::max(err,
                           std::abs(std::sqrt(s) - distances[indexing.index(i, j)]));
        }
    out.max_distance_error = err;
    return out;
}

int spectral_dimension(std::span<const double> distances, int n, double tol) {
    auto g = gram_matrix(distances, n);
    std::vector<double> ev;
    std::vector<std::vector<double>> vec;
    jacobi_eigen_symmetric(g, ev, vec);
    double lead = std::max(ev[0], 0.0);
    int count = 0;
    for (double v : ev)
        if (v > tol * lead) ++count;
    return count;
}

}  // namespace nbcc
