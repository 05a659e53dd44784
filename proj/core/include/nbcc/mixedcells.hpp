// Random lifting, fine mixed-cell enumeration by LP feasibility, and mixed
// volume computation for the supports of a square polynomial system.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nbcc/poly.hpp"

namespace nbcc {

struct LiftedSupport {
    std::vector<Exponents> points;
    std::vector<double> lifts;  // i.i.d. uniform (0,1), deterministic per seed
};

/// One fine mixed cell: an edge (pair of point indices) per support, plus
/// its integer volume |det| of the edge-difference matrix.
struct MixedCell {
    std::vector<std::pair<int, int>> edges;  // edges[i] indexes lifted[i].points
    long long volume = 0;
};

struct MixedVolumeResult {
    unsigned long long mixed_volume = 0;
    std::vector<MixedCell> cells;
    std::uint64_t lifting_seed = 0;
};

/// Thrown when an LP feasibility test lands inside the tie tolerance; the
/// caller re-lifts with another seed rather than perturbing in place.
struct DegenerateLiftingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<LiftedSupport> lift_supports(
    const std::vector<std::vector<Exponents>>& supports, std::uint64_t seed);

/// Enumerates the fine mixed cells of the lifted subdivision by depth-first
/// extension of edge selections with LP pruning; pairwise edge-compatibility
/// tables cut the branching before any node LP runs. Cells are emitted in a
/// canonical (sorted) order.
std::vector<MixedCell> enumerate_cells(const std::vector<LiftedSupport>& lifted);

/// Streaming variant for very large subdivisions: `sink` is invoked once per
/// cell; cells arrive in canonical order.
void enumerate_cells(const std::vector<LiftedSupport>& lifted,
                     const std::function<void(const MixedCell&)>& sink);

/// Bernshtein bound on isolated torus zeros. Re-lifts with successive seeds
/// if a degenerate lifting is detected. Set keep_cells=false for large runs
/// where only the volume matters.
MixedVolumeResult mixed_volume(const PolySystem& system, std::uint64_t seed,
                               bool keep_cells = true);

/// |det| of the n x n integer matrix, exact (fraction-free elimination with
/// 128-bit intermediates).
long long integer_det_abs(std::vector<std::vector<long long>> m);

}  // namespace nbcc
