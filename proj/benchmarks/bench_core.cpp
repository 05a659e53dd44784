#include <benchmark/benchmark.h>

#include "nbcc/acsys.hpp"
#include "nbcc/certify.hpp"
#include "nbcc/fivebody.hpp"
#include "nbcc/mixedcells.hpp"
#include "nbcc/rng.hpp"
#include "nbcc/tracker.hpp"

using namespace nbcc;

namespace {

std::vector<Complex> random_point(int n, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<Complex> pt(n);
    for (auto& c : pt) c = rng.unit_complex() * (0.5 + rng.unit_double());
    return pt;
}

void SystemEval(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    ACSystem ac = build_ac_system(MassVector::equal(n));
    auto pt = random_point(ac.system.nvars(), 7);
    EvalWorkspace ws;
    std::vector<Complex> out(ac.system.size());
    for (auto _ : state) {
        ac.system.eval(pt, out, ws);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(SystemEval)->Arg(3)->Arg(4)->Arg(5);

void SystemJacobian(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    ACSystem ac = build_ac_system(MassVector::equal(n));
    auto pt = random_point(ac.system.nvars(), 7);
    EvalWorkspace ws;
    Eigen::MatrixXcd jac;
    for (auto _ : state) {
        ac.system.jacobian_eval(pt, jac, ws);
        benchmark::DoNotOptimize(jac.data());
    }
}
BENCHMARK(SystemJacobian)->Arg(3)->Arg(4)->Arg(5);

void MixedVolumeN3(benchmark::State& state) {
    ACSystem ac = build_ac_system(MassVector::equal(3));
    for (auto _ : state) {
        auto mv = mixed_volume(ac.system, 1, false);
        benchmark::DoNotOptimize(mv.mixed_volume);
    }
}
BENCHMARK(MixedVolumeN3);

void TrackOnePath(benchmark::State& state) {
    ACSystem ac = build_ac_system(MassVector::equal(3));
    auto start = build_polyhedral_start(ac.system, 1, 1'000'000);
    TrackerOptions opts;
    for (auto _ : state) {
        auto pt = start->start_point(0);
        PathResult r = track_path(start->homotopy(0), pt, ac.system, opts);
        benchmark::DoNotOptimize(r.status);
    }
}
BENCHMARK(TrackOnePath);

void KrawczykFiveBody(benchmark::State& state) {
    MassVector masses = MassVector::equal(5);
    ACSystem ac = build_ac_system(masses);
    auto seeds = five_body_class_seeds();
    auto refined = newton_refine(seeds[1].distances, masses, 2e-14, 80);
    auto full = ac.lift_distances_real(refined.distances);
    for (auto _ : state) {
        auto cert = certify_solution(ac.system, full, 1e-8);
        benchmark::DoNotOptimize(cert.status);
    }
}
BENCHMARK(KrawczykFiveBody);

}  // namespace

BENCHMARK_MAIN();
