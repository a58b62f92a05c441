#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "meshfwd/markov.hpp"
#include "meshfwd/rng.hpp"

using namespace meshfwd;
using markov::AbsorptionProblem;
using markov::SolveMethod;

namespace {

// Direct slot-by-slot simulation of the progress chain.
double simulate_absorption(const AbsorptionProblem& p, int trials,
                           std::uint64_t seed, double* sigma_of_mean) {
    rng::Stream s(seed, 0);
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> pos(static_cast<std::size_t>(p.n), 0);
        int finished = 0;
        int slots = 0;
        while (finished < p.k) {
            ++slots;
            for (auto& v : pos) {
                if (v == p.m) continue;
                if (!s.bernoulli(p.e)) {
                    ++v;
                    if (v == p.m) ++finished;
                }
            }
        }
        sum += slots;
        sum2 += static_cast<double>(slots) * slots;
    }
    const double mean = sum / trials;
    const double var = (sum2 - sum * sum / trials) / (trials - 1.0);
    *sigma_of_mean = std::sqrt(var / trials);
    return mean;
}

}  // namespace

TEST_SUITE("markov") {

TEST_CASE("state encoding round-trips") {
    const int n = 3, m = 2;
    for (std::uint64_t idx = 0; idx < 27; ++idx) {
        const auto s = markov::decode_state(idx, n, m);
        CHECK(markov::encode_state(s, m) == idx);
    }
    CHECK(markov::encode_state({2, 1, 0}, 2) == 2 + 1 * 3);
    CHECK(markov::decode_state(26, 3, 2) == markov::State{2, 2, 2});
}

TEST_CASE("state space enumeration") {
    AbsorptionProblem p;
    p.n = 3;
    p.m = 2;
    p.k = 2;
    p.e = 0.2;
    const auto space = markov::enumerate_states(p);
    CHECK(space.total_states == 27);
    CHECK(space.absorbing_count == 7);
    CHECK(space.transient.size() == 20);
    for (std::size_t row = 0; row < space.transient.size(); ++row) {
        CHECK(space.transient_row[space.transient[row]] ==
              static_cast<std::int64_t>(row));
    }
    std::size_t absorbing_rows = 0;
    for (auto r : space.transient_row)
        if (r == -1) ++absorbing_rows;
    CHECK(absorbing_rows == space.absorbing_count);
}

TEST_CASE("transition probabilities") {
    AbsorptionProblem p;
    p.n = 3;
    p.m = 2;
    p.k = 2;
    p.e = 0.2;
    CHECK(markov::transition_prob({2, 0, 1}, {2, 1, 2}, p) ==
          doctest::Approx(0.64).epsilon(1e-12));
    CHECK(markov::transition_prob({0, 0, 0}, {0, 0, 0}, p) ==
          doctest::Approx(0.2 * 0.2 * 0.2).epsilon(1e-12));
    CHECK(markov::transition_prob({0, 0, 0}, {1, 0, 1}, p) ==
          doctest::Approx(0.8 * 0.2 * 0.8).epsilon(1e-12));
    // Backward or two-hop moves are impossible, finished paths hold.
    CHECK(markov::transition_prob({1, 0, 0}, {0, 0, 0}, p) == 0.0);
    CHECK(markov::transition_prob({0, 0, 0}, {2, 0, 0}, p) == 0.0);
    CHECK(markov::transition_prob({2, 2, 0}, {2, 2, 1}, p) == 0.0);
    // Absorbing states self-loop.
    CHECK(markov::transition_prob({2, 2, 0}, {2, 2, 0}, p) == 1.0);
    // Rows leaving a transient state sum to one.
    const auto space = markov::enumerate_states(p);
    const auto from = markov::decode_state(space.transient[0], p.n, p.m);
    double total = 0.0;
    for (std::uint64_t idx = 0; idx < space.total_states; ++idx) {
        total += markov::transition_prob(
            from, markov::decode_state(idx, p.n, p.m), p);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed forms for degenerate chains") {
    for (int n = 1; n <= 7; ++n) {
        for (double e : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            AbsorptionProblem p;
            p.n = n;
            p.m = 1;
            p.k = 1;
            p.e = e;
            const double want = 1.0 / (1.0 - std::pow(e, n));
            CHECK(markov::expected_absorption_time(p) ==
                  doctest::Approx(want).epsilon(1e-10));
        }
    }
    for (int m = 1; m <= 6; ++m) {
        for (double e : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            AbsorptionProblem p;
            p.n = 1;
            p.m = m;
            p.k = 1;
            p.e = e;
            CHECK(markov::expected_absorption_time(p) ==
                  doctest::Approx(m / (1.0 - e)).epsilon(1e-10));
        }
    }
}

TEST_CASE("recurrence and dense solver agree") {
    const int grid[][3] = {{3, 2, 2}, {3, 2, 3}, {3, 4, 2}, {5, 3, 2},
                           {7, 2, 3}, {7, 2, 4}, {2, 5, 1}, {4, 3, 4}};
    for (const auto& g : grid) {
        for (double e : {0.2, 0.4, 0.8}) {
            AbsorptionProblem p;
            p.n = g[0];
            p.m = g[1];
            p.k = g[2];
            p.e = e;
            const double rec =
                markov::expected_absorption_time(p, SolveMethod::Recurrence);
            const double lu =
                markov::expected_absorption_time(p, SolveMethod::DenseLU);
            CHECK(std::abs(rec - lu) <= 1e-10 * std::max(1.0, std::abs(rec)));
        }
    }
}

TEST_CASE("absorption time matches simulation") {
    AbsorptionProblem p;
    p.n = 3;
    p.m = 2;
    p.k = 2;
    p.e = 0.3;
    double sigma = 0.0;
    const double sim = simulate_absorption(p, 200000, 77, &sigma);
    const double analytic = markov::expected_absorption_time(p);
    CHECK(std::abs(sim - analytic) <= 3.0 * sigma + 1e-9);
}

TEST_CASE("boundary error rates") {
    AbsorptionProblem p;
    p.n = 3;
    p.m = 4;
    p.k = 2;
    p.e = 0.0;
    CHECK(markov::expected_absorption_time(p) == doctest::Approx(4.0));
    p.e = 1.0;
    CHECK(std::isinf(markov::expected_absorption_time(p)));
}

TEST_CASE("scheme evaluation semantics") {
    markov::SchemeParams p;
    p.n = 3;
    p.m = 2;
    p.e = 0.2;
    p.k = 2;

    const auto sp = markov::evaluate_scheme(Scheme::SP, p);
    CHECK(sp.delay == doctest::Approx(2.0 / 0.8).epsilon(1e-12));
    CHECK(sp.units_per_delivery == 1.0);
    CHECK(sp.throughput == doctest::Approx(1.0 / sp.delay).epsilon(1e-12));

    const auto mp = markov::evaluate_scheme(Scheme::MP, p);
    CHECK(mp.delay == doctest::Approx(sp.delay).epsilon(1e-12));
    CHECK(mp.units_per_delivery == 3.0);

    AbsorptionProblem chain;
    chain.n = 3;
    chain.m = 2;
    chain.e = 0.2;

    chain.k = 1;
    const auto mc = markov::evaluate_scheme(Scheme::MC, p);
    CHECK(mc.delay ==
          doctest::Approx(markov::expected_absorption_time(chain)).epsilon(1e-12));
    CHECK(mc.units_per_delivery == 1.0);

    chain.k = 2;
    const auto nc = markov::evaluate_scheme(Scheme::NC, p);
    CHECK(nc.delay ==
          doctest::Approx(markov::expected_absorption_time(chain)).epsilon(1e-12));
    CHECK(nc.units_per_delivery == 2.0);
    CHECK(nc.throughput == doctest::Approx(2.0 / nc.delay).epsilon(1e-12));

    const auto ncl = markov::evaluate_scheme(Scheme::NC_L, p);
    CHECK(ncl.delay == doctest::Approx(nc.delay).epsilon(1e-12));

    chain.k = 3;
    const auto ncu = markov::evaluate_scheme(Scheme::NC_U, p);
    CHECK(ncu.delay ==
          doctest::Approx(markov::expected_absorption_time(chain)).epsilon(1e-12));
    CHECK(ncu.units_per_delivery == 2.0);
    CHECK(ncu.delay > nc.delay);
}

TEST_CASE("evaluate_schemes fills ratios against SP") {
    markov::SchemeParams p;
    p.n = 3;
    p.m = 2;
    p.e = 0.2;
    p.k = 2;
    const auto all = markov::evaluate_schemes(
        {Scheme::SP, Scheme::NC, Scheme::MC}, p);
    const double sp_delay = all.at(Scheme::SP).delay;
    CHECK(all.at(Scheme::SP).delay_ratio_to_sp == doctest::Approx(1.0));
    CHECK(all.at(Scheme::NC).delay_ratio_to_sp ==
          doctest::Approx(all.at(Scheme::NC).delay / sp_delay).epsilon(1e-12));
    CHECK(all.at(Scheme::MC).throughput_ratio_to_sp ==
          doctest::Approx(all.at(Scheme::MC).throughput /
                          all.at(Scheme::SP).throughput)
              .epsilon(1e-12));
}

TEST_CASE("strict path-count rule for coding schemes") {
    markov::SchemeParams p;
    p.n = 4;
    p.m = 2;
    p.e = 0.2;
    p.k = 2;
    p.strict_paths = true;
    CHECK_THROWS_AS(markov::evaluate_scheme(Scheme::NC, p),
                    std::invalid_argument);
    CHECK_NOTHROW(markov::evaluate_scheme(Scheme::SP, p));
    CHECK_NOTHROW(markov::evaluate_scheme(Scheme::MC, p));
    p.n = 3;
    CHECK_NOTHROW(markov::evaluate_scheme(Scheme::NC, p));
    p.n = 7;
    p.k = 3;
    CHECK_NOTHROW(markov::evaluate_scheme(Scheme::NC_U, p));
}

TEST_CASE("invalid problems are rejected") {
    AbsorptionProblem p;
    p.n = 2;
    p.m = 1;
    p.k = 3;
    p.e = 0.2;
    CHECK_THROWS_AS(markov::expected_absorption_time(p), std::invalid_argument);
    p.k = 1;
    p.e = 1.5;
    CHECK_THROWS_AS(markov::expected_absorption_time(p), std::invalid_argument);

    AbsorptionProblem big;
    big.n = 3;
    big.m = 2;
    big.k = 2;
    big.e = 0.2;
    big.state_budget = 10;
    CHECK_THROWS_AS(markov::enumerate_states(big), markov::StateBudgetError);
    try {
        markov::enumerate_states(big);
    } catch (const markov::StateBudgetError& err) {
        CHECK(err.required == 27);
        CHECK(err.budget == 10);
    }

    markov::SchemeParams sp;
    sp.n = 3;
    sp.m = 2;
    sp.e = 0.2;
    sp.k = 2;
    sp.state_budget = 10;
    CHECK_THROWS_AS(markov::evaluate_scheme(Scheme::NC, sp),
                    markov::StateBudgetError);
    CHECK_NOTHROW(markov::evaluate_scheme(Scheme::SP, sp));
}

}  // TEST_SUITE
