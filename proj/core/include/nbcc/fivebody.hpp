// The ten known classes of isolated central configurations of five equal
// masses: symmetry ansatze with frozen shape parameters, used to seed
// refinement and certification without the quarter-billion-path solve.

#pragma once

#include <string>
#include <vector>

namespace nbcc {

struct FiveBodyClassSeed {
    std::string name;
    int expected_isotropy = 0;   // |S_5 stabilizer| of the distance vector
    int expected_orbit = 0;      // 120 / isotropy
    int expected_dimension = 0;  // 1 collinear .. 4 simplex
    std::vector<double> distances;  // pair order, from the symmetry ansatz
};

/// All ten classes. Distances come from the frozen ansatz parameters and sit
/// within ~1e-13 of the exact roots; callers refine with newton_refine.
std::vector<FiveBodyClassSeed> five_body_class_seeds();

}  // namespace nbcc
