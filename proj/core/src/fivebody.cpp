#include "nbcc/fivebody.hpp"

#include <array>
#include <cmath>

#include "nbcc/acsys.hpp"

namespace nbcc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> distances_of(const std::vector<std::array<double, 3>>& pts) {
    auto indexing = DistanceIndexing::make(5);
    std::vector<double> d(indexing.count());
    for (const auto& [i, j] : indexing.pairs) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) {
            double diff = pts[i][a] - pts[j][a];
            s += diff * diff;
        }
        d[indexing.index(i, j)] = std::sqrt(s);
    }
    return d;
}

}  // namespace

// Shape parameters found by damped Gauss-Newton on the distance-equation
// residual inside each symmetry ansatz; every seed below has residual
// infinity-norm < 1e-13 before any further refinement.
std::vector<FiveBodyClassSeed> five_body_class_seeds() {
    std::vector<FiveBodyClassSeed> seeds;

    {
        // bodies on a line at (-a, -b, 0, b, a)
        const double a = 1.0192559815015123, b = 0.4807674389606599;
        std::vector<std::array<double, 3>> pts = {
            {-a, 0, 0}, {-b, 0, 0}, {0, 0, 0}, {b, 0, 0}, {a, 0, 0}};
        seeds.push_back({"collinear", 2, 60, 1, distances_of(pts)});
    }
    {
        // square vertices at distance u from the middle mass
        const double u = 0.7315008567748200;
        std::vector<std::array<double, 3>> pts = {
            {u, 0, 0}, {0, u, 0}, {-u, 0, 0}, {0, -u, 0}, {0, 0, 0}};
        seeds.push_back({"square-plus-center", 8, 15, 2, distances_of(pts)});
    }
    {
        const double rho = 0.6505135067179386;
        std::vector<std::array<double, 3>> pts;
        for (int k = 0; k < 5; ++k)
            pts.push_back({rho * std::cos(2 * kPi * k / 5),
                           rho * std::sin(2 * kPi * k / 5), 0});
        seeds.push_back({"regular-pentagon", 10, 12, 2, distances_of(pts)});
    }
    {
        // isosceles triangle, interior mirror pair; apex fixed by the
        // centroid
        const double wb = 0.8598262173639731, yb = -0.2434388348277771;
        const double wd = 0.2871169654499727, yd = -0.1057443971733517;
        const double ya = -2.0 * (yb + yd);
        std::vector<std::array<double, 3>> pts = {
            {0, ya, 0}, {wb, yb, 0}, {-wb, yb, 0}, {wd, yd, 0}, {-wd, yd, 0}};
        seeds.push_back({"triangle-interior-pair", 2, 60, 2, distances_of(pts)});
    }
    {
        // isosceles trapezoid with one mass inside on the axis
        const double w1 = 0.6342901340237294, y1 = 0.4322589926295429;
        const double w2 = 0.4433098557457958, y2 = -0.5199496125148216;
        const double y3 = -2.0 * (y1 + y2);
        std::vector<std::array<double, 3>> pts = {
            {w1, y1, 0}, {-w1, y1, 0}, {w2, y2, 0}, {-w2, y2, 0}, {0, y3, 0}};
        seeds.push_back({"trapezoid-interior", 2, 60, 2, distances_of(pts)});
    }
    {
        // equilateral triangle with a symmetric axial pair (convex)
        const double rho = 0.6320402958783782, h = 0.6453811921325212;
        std::vector<std::array<double, 3>> pts;
        for (int k = 0; k < 3; ++k)
            pts.push_back({rho * std::cos(2 * kPi * k / 3),
                           rho * std::sin(2 * kPi * k / 3), 0});
        pts.push_back({0, 0, h});
        pts.push_back({0, 0, -h});
        seeds.push_back({"triangle-axial-convex", 12, 10, 3, distances_of(pts)});
    }
    {
        // pyramid over a square base
        const double u = 0.4389871449650788, h = 0.7839518946407474;
        std::vector<std::array<double, 3>> pts = {
            {u, u, 0}, {u, -u, 0}, {-u, u, 0}, {-u, -u, 0}, {0, 0, h}};
        seeds.push_back({"square-pyramid", 8, 15, 3, distances_of(pts)});
    }
    {
        // regular tetrahedron with the fifth mass at its barycenter
        const double rho = 0.7266663096336923;
        const double s = rho / std::sqrt(3.0);
        std::vector<std::array<double, 3>> pts = {
            {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}, {0, 0, 0}};
        seeds.push_back({"tetrahedron-plus-center", 24, 5, 3, distances_of(pts)});
    }
    {
        // equilateral triangle with two axial masses on the same side
        // (concave: the lower one sits inside the hull)
        const double rho = 0.6405820511937450;
        const double z1 = 0.4060544534519013, z2 = 1.0739220862750791;
        std::vector<std::array<double, 3>> pts;
        for (int k = 0; k < 3; ++k)
            pts.push_back({rho * std::cos(2 * kPi * k / 3),
                           rho * std::sin(2 * kPi * k / 3), 0});
        pts.push_back({0, 0, z1});
        pts.push_back({0, 0, z2});
        seeds.push_back({"triangle-axial-concave", 6, 20, 3, distances_of(pts)});
    }
    {
        // the regular 4-simplex: S_ij = 0 forces every distance to 1
        seeds.push_back({"regular-4-simplex", 120, 1, 4,
                         std::vector<double>(10, 1.0)});
    }
    return seeds;
}

}  // namespace nbcc
