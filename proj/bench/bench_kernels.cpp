#include <benchmark/benchmark.h>

#include <omp.h>

#include "povmrand/certify.hpp"
#include "povmrand/qsim.hpp"

using namespace povmrand;

namespace {

struct SchurFixture {
    SdpInstance inst;
    BlockMatrix B, Z;

    SchurFixture() {
        const Certificate c = elegantCertificate(0);
        inst = compile(buildBellMomentProblem(elegantScenario(), LevelSpec::parse("2"), EventForm::fromBell(c.functional))).sdp;
        B = BlockMatrix::identity(inst.blockSizes, 0.5);
        Z = BlockMatrix::identity(inst.blockSizes, 2.0);
    }
};

const SchurFixture& schurFixture() {
    static const SchurFixture f;
    return f;
}

void BM_SchurSerial(benchmark::State& state) {
    const auto& f = schurFixture();
    for (auto _ : state) benchmark::DoNotOptimize(schurComplementSerial(f.inst, f.B, f.Z));
}
BENCHMARK(BM_SchurSerial)->Unit(benchmark::kMillisecond);

void BM_SchurParallel(benchmark::State& state) {
    const auto& f = schurFixture();
    for (auto _ : state) benchmark::DoNotOptimize(schurComplement(f.inst, f.B, f.Z, true));
}
BENCHMARK(BM_SchurParallel)->Unit(benchmark::kMillisecond);

void BM_SeesawRestarts(benchmark::State& state) {
    omp_set_num_threads(static_cast<int>(state.range(0)));
    SeesawOptions o;
    o.restarts = 8;
    const Certificate c = elegantCertificate(1);
    for (auto _ : state) benchmark::DoNotOptimize(seesawBell(elegantScenario(), c.functional, 2, o).value);
}
BENCHMARK(BM_SeesawRestarts)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ClassicalPointChsh(benchmark::State& state) {
    ClassicalSweepConfig cfg;
    cfg.ladder = {LevelSpec::parse("1"), LevelSpec::parse("1+AB")};
    cfg.workers = static_cast<int>(state.range(0));
    cfg.xStar = 0;
    const Certificate c = chshCertificate();
    for (auto _ : state) benchmark::DoNotOptimize(classicalPoint(c, 2.7, cfg).p);
}
BENCHMARK(BM_ClassicalPointChsh)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
