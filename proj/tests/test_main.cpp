#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "oracles.hpp"

namespace nbcc::testing {

std::vector<Exponents> ac_equation_support_oracle(int n, int i, int j,
                                                  bool collected) {
    const int k = n * (n - 1) / 2;
    const int nv = 2 * k;
    auto pidx = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return a * n - a * (a + 1) / 2 + (b - a - 1);
    };
    const double lambda = -1.0;
    std::map<Exponents, double> acc;
    std::set<Exponents> seen;
    auto add = [&](const Exponents& e, double c) {
        acc[e] += c;
        seen.insert(e);
    };
    for (int kk = 0; kk < n; ++kk) {
        const int halves[2][2] = {{i, j}, {j, i}};
        for (const auto& h : halves) {
            const int a = h[0], b = h[1];
            if (kk == a) continue;
            std::vector<std::pair<int, double>> quad;
            if (kk != b) quad.emplace_back(pidx(b, kk), 1.0);
            quad.emplace_back(pidx(a, kk), -1.0);
            quad.emplace_back(pidx(a, b), -1.0);
            for (auto [rv, sg] : quad) {
                Exponents e1(nv, 0);
                e1[rv] = 2;
                e1[k + pidx(a, kk)] = 1;
                add(e1, sg);
                Exponents e2(nv, 0);
                e2[rv] = 2;
                add(e2, sg * lambda);
            }
        }
    }
    std::vector<Exponents> out;
    for (const auto& e : seen)
        if (!collected || acc[e] != 0.0) out.push_back(e);
    return out;
}

}  // namespace nbcc::testing
