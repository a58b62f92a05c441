#include <benchmark/benchmark.h>

#include "meshfwd/channel.hpp"
#include "meshfwd/markov.hpp"
#include "meshfwd/netcode.hpp"
#include "meshfwd/simulator.hpp"

using namespace meshfwd;

namespace {

void BM_MarkovRecurrence(benchmark::State& state) {
    markov::AbsorptionProblem p;
    p.n = int(state.range(0));
    p.m = 4;
    p.k = p.n == 3 ? 2 : 3;
    p.e = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(markov::expected_absorption_time(
            p, markov::SolveMethod::Recurrence));
    }
}
BENCHMARK(BM_MarkovRecurrence)->Arg(3)->Arg(5);

void BM_MarkovDenseLU(benchmark::State& state) {
    markov::AbsorptionProblem p;
    p.n = int(state.range(0));
    p.m = 4;
    p.k = p.n == 3 ? 2 : 3;
    p.e = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            markov::expected_absorption_time(p, markov::SolveMethod::DenseLU));
    }
}
BENCHMARK(BM_MarkovDenseLU)->Arg(3)->Arg(5);

void BM_ChannelSuccess(benchmark::State& state) {
    channel::ChannelParams par;
    par.gamma = 20.0;
    par.eta = 6.31335e-8;
    std::vector<channel::Position> active;
    for (int i = 0; i < 8; ++i) {
        active.push_back({double(40 * (i % 3)), double(80 * i - 320)});
    }
    const channel::Position rx{160.0, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            channel::success_probability(0, rx, active, par));
    }
}
BENCHMARK(BM_ChannelSuccess);

void BM_SimulatorSlots(benchmark::State& state) {
    sim::SimConfig cfg;
    cfg.topology = sim::build_grid_topology(3, 4, 40.0, 80.0);
    cfg.scheme = Scheme::NC;
    cfg.gen_size = 2;
    cfg.channel.gamma = 20.0;
    cfg.channel.eta = 6.31335e-8;
    cfg.flow_rate = 4.5e6;
    cfg.stop_after = 200;
    std::uint64_t seed = 1;
    long long slots = 0;
    for (auto _ : state) {
        cfg.seed = seed++;
        const auto m = sim::run(cfg);
        slots += m.slots;
        benchmark::DoNotOptimize(m.delivered);
    }
    state.counters["slots/s"] = benchmark::Counter(
        double(slots), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulatorSlots)->Unit(benchmark::kMillisecond);

void BM_DecodeGeneration(benchmark::State& state) {
    netcode::Generation g;
    g.k = 3;
    for (int i = 0; i < 3; ++i) {
        g.payloads.emplace_back(1500, std::uint8_t(0x11 * (i + 1)));
    }
    const auto coded = netcode::encode_all(g);
    const std::vector<netcode::CodedPacket> subset = {coded[0], coded[2],
                                                      coded[5]};
    for (auto _ : state) {
        benchmark::DoNotOptimize(netcode::decode(subset, 3));
    }
}
BENCHMARK(BM_DecodeGeneration);

}  // namespace

BENCHMARK_MAIN();
