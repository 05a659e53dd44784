#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nbcc/acsys.hpp"
#include "nbcc/poly.hpp"
#include "nbcc/rng.hpp"
#include "oracles.hpp"

using namespace nbcc;

namespace {

Polynomial make_poly(int nvars, std::vector<std::pair<Exponents, Complex>> terms) {
    return Polynomial(nvars, std::move(terms));
}

// random dense system for property tests
PolySystem random_system(int nvars, int degree, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<Polynomial> polys;
    for (int p = 0; p < nvars; ++p) {
        std::vector<std::pair<Exponents, Complex>> terms;
        std::function<void(Exponents&, int, int)> rec = [&](Exponents& e, int var,
                                                            int left) {
            if (var == nvars) {
                terms.emplace_back(e, rng.unit_complex() * (0.2 + rng.unit_double()));
                return;
            }
            for (int d = 0; d <= left; ++d) {
                e[var] = d;
                rec(e, var + 1, left - d);
            }
            e[var] = 0;
        };
        Exponents e(nvars, 0);
        rec(e, 0, degree);
        polys.push_back(Polynomial(nvars, std::move(terms)));
    }
    return PolySystem(nvars, std::move(polys));
}

}  // namespace

TEST_CASE("eval: direct arithmetic") {
    // x^2 + y - 1 at (2,3) = 6
    auto p = make_poly(2, {{{2, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -1.0}});
    PolySystem sys(2, {p});
    auto v = sys.eval(std::vector<Complex>{2.0, 3.0});
    CHECK(v[0] == Complex(6.0, 0.0));
}

TEST_CASE("eval: identity point of a binomial pair") {
    auto p1 = make_poly(2, {{{3, 1}, 1.0}, {{0, 0}, -1.0}});
    auto p2 = make_poly(2, {{{1, 2}, 1.0}, {{0, 0}, -1.0}});
    PolySystem sys(2, {p1, p2});
    auto v = sys.eval(std::vector<Complex>{1.0, 1.0});
    CHECK(std::abs(v[0]) == 0.0);
    CHECK(std::abs(v[1]) == 0.0);
}

TEST_CASE("eval: distance system vanishes at the unit point for n=3") {
    ACSystem ac = build_ac_system(MassVector::equal(3));
    std::vector<Complex> ones(6, 1.0);
    auto v = ac.system.eval(ones);
    for (const Complex& c : v) CHECK(std::abs(c) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("jacobian: power rule rows") {
    auto p = make_poly(2, {{{2, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -1.0}});
    PolySystem sys(2, {p});
    auto jac = sys.jacobian_eval(std::vector<Complex>{2.0, 3.0});
    CHECK(jac(0, 0) == Complex(4.0, 0.0));
    CHECK(jac(0, 1) == Complex(1.0, 0.0));

    auto p1 = make_poly(2, {{{3, 1}, 1.0}, {{0, 0}, -1.0}});
    auto p2 = make_poly(2, {{{1, 2}, 1.0}, {{0, 0}, -1.0}});
    PolySystem sys2(2, {p1, p2});
    auto jac2 = sys2.jacobian_eval(std::vector<Complex>{1.0, 1.0});
    CHECK(jac2(0, 0) == Complex(3.0, 0.0));
    CHECK(jac2(0, 1) == Complex(1.0, 0.0));
    CHECK(jac2(1, 0) == Complex(1.0, 0.0));
    CHECK(jac2(1, 1) == Complex(2.0, 0.0));
}

TEST_CASE("jacobian agrees with central differences on random systems") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        int nvars = 2 + static_cast<int>(seed % 5);  // up to 6 variables
        int degree = 2 + static_cast<int>(seed % 3);
        PolySystem sys = random_system(nvars, std::min(degree, 4), seed);
        RandomStream rng(seed + 100);
        std::vector<Complex> x(nvars);
        for (auto& c : x) c = rng.unit_complex() * 0.8;
        auto jac = sys.jacobian_eval(x);
        auto fd = nbcc::testing::finite_difference_jacobian(sys, x);
        double err = (jac - fd).cwiseAbs().maxCoeff();
        CHECK(err < 1e-6);
    }
}

TEST_CASE("support: basic examples") {
    auto p = make_poly(2, {{{2, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -1.0}});
    auto sup = p.support();
    REQUIRE(sup.size() == 3);
    CHECK(std::find(sup.begin(), sup.end(), Exponents{2, 0}) != sup.end());
    CHECK(std::find(sup.begin(), sup.end(), Exponents{0, 1}) != sup.end());
    CHECK(std::find(sup.begin(), sup.end(), Exponents{0, 0}) != sup.end());

    Polynomial zero;
    CHECK(zero.support().empty());
}

TEST_CASE("support: one n=4 distance equation against the expansion oracle") {
    // The equations are built with the expansion's support kept as written;
    // the oracle expands the same equation independently. The collected form
    // has 14 monomials, the as-written form 18.
    ACSystem ac = build_ac_system(MassVector::equal(4));
    auto sup = ac.system.poly(0).support();
    auto oracle_kept = nbcc::testing::ac_equation_support_oracle(4, 0, 1, false);
    auto oracle_collected = nbcc::testing::ac_equation_support_oracle(4, 0, 1, true);
    CHECK(oracle_collected.size() == 14);
    CHECK(oracle_kept.size() == 18);
    REQUIRE(sup.size() == oracle_kept.size());
    std::sort(sup.begin(), sup.end());
    std::sort(oracle_kept.begin(), oracle_kept.end());
    CHECK(sup == oracle_kept);
}

TEST_CASE("total degree") {
    auto p1 = make_poly(2, {{{2, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -1.0}});
    auto p2 = make_poly(2, {{{1, 1}, 1.0}, {{0, 0}, -2.0}});
    CHECK(PolySystem(2, {p1, p2}).total_degree() == 4);

    CHECK(build_ac_system(MassVector::equal(4)).system.total_degree() == 2985984ULL);
    CHECK(build_ac_system(MassVector::equal(3)).system.total_degree() == 1728ULL);
}

TEST_CASE("eval is linear in coefficients") {
    RandomStream rng(42);
    PolySystem p = random_system(3, 3, 11);
    PolySystem q = random_system(3, 3, 12);
    Complex a = rng.unit_complex() * 2.0, b = rng.unit_complex() * 0.7;
    // aP + bQ assembled term-by-term
    std::vector<Polynomial> combo;
    for (int i = 0; i < 3; ++i) {
        std::vector<std::pair<Exponents, Complex>> terms;
        for (std::size_t t = 0; t < p.poly(i).exponents().size(); ++t)
            terms.emplace_back(p.poly(i).exponents()[t], a * p.poly(i).coefficients()[t]);
        for (std::size_t t = 0; t < q.poly(i).exponents().size(); ++t)
            terms.emplace_back(q.poly(i).exponents()[t], b * q.poly(i).coefficients()[t]);
        combo.emplace_back(3, std::move(terms));
    }
    PolySystem pc(3, std::move(combo));
    std::vector<Complex> x = {Complex(0.3, 0.4), Complex(-1.1, 0.2), Complex(0.9, -0.5)};
    auto vc = pc.eval(x);
    auto vp = p.eval(x);
    auto vq = q.eval(x);
    for (int i = 0; i < 3; ++i) {
        Complex expect = a * vp[i] + b * vq[i];
        CHECK(std::abs(vc[i] - expect) <= 1e-13 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("rebuilding from (coefficient, exponent) pairs reproduces eval bit-for-bit") {
    PolySystem sys = random_system(3, 3, 77);
    std::vector<Polynomial> rebuilt;
    for (int i = 0; i < sys.size(); ++i) {
        std::vector<std::pair<Exponents, Complex>> terms;
        for (std::size_t t = 0; t < sys.poly(i).exponents().size(); ++t)
            terms.emplace_back(sys.poly(i).exponents()[t], sys.poly(i).coefficients()[t]);
        rebuilt.emplace_back(3, std::move(terms));
    }
    PolySystem sys2(3, std::move(rebuilt));
    RandomStream rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> x(3);
        for (auto& c : x) c = rng.unit_complex() * (0.5 + rng.unit_double());
        auto v1 = sys.eval(x);
        auto v2 = sys2.eval(x);
        for (int i = 0; i < 3; ++i) {
            CHECK(v1[i].real() == v2[i].real());
            CHECK(v1[i].imag() == v2[i].imag());
        }
    }
}

TEST_CASE("text format round-trips, including structural zero terms") {
    ACSystem ac = build_ac_system(MassVector::equal(3));
    std::string text = to_text(ac.system);
    PolySystem back = system_from_text(text);
    CHECK(back == ac.system);

    PolySystem rnd = random_system(2, 3, 3);
    CHECK(system_from_text(to_text(rnd)) == rnd);

    auto path = std::filesystem::temp_directory_path() / "nbcc_poly_roundtrip.txt";
    save_system(ac.system, path.string());
    CHECK(load_system(path.string()) == ac.system);
    std::filesystem::remove(path);
}

TEST_CASE("dimension mismatches throw") {
    auto p = make_poly(2, {{{2, 0}, 1.0}});
    PolySystem sys(2, {p});
    CHECK_THROWS(sys.eval(std::vector<Complex>{1.0}));
    CHECK_THROWS(sys.jacobian_eval(std::vector<Complex>{1.0, 2.0, 3.0}));
}
