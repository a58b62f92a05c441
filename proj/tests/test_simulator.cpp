#include <cmath>

#include "doctest.h"
#include "meshfwd/simulator.hpp"

using namespace meshfwd;

namespace {

sim::SimConfig fast_forced_config(Scheme scheme, int paths, int hops,
                                  double e) {
    sim::SimConfig cfg;
    cfg.topology = sim::build_grid_topology(paths, hops, 40.0, 80.0);
    cfg.scheme = scheme;
    cfg.gen_size = paths >= 7 ? 3 : 2;
    cfg.source_tx_prob = 1.0;
    cfg.contention_window = 0;
    cfg.flow_rate = 48e6;
    cfg.stop_after = 400;
    cfg.seed = 9;
    return sim::forced_error_mode(std::move(cfg), e);
}

void check_conservation(const sim::SimMetrics& m) {
    CHECK(m.generated ==
          m.delivered_receptions + m.purged + m.in_queue);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("grid topology layout") {
    const auto t = sim::build_grid_topology(3, 4, 40.0, 80.0);
    CHECK(t.positions.size() == 11);  // source, dest, 3 * 3 relays
    CHECK(t.routes.size() == 3);
    for (const auto& route : t.routes) {
        CHECK(route.size() == 5);
        CHECK(route.front() == t.source);
        CHECK(route.back() == t.dest);
    }
    CHECK(t.positions[t.source].x == 0.0);
    CHECK(t.positions[t.source].y == 0.0);
    CHECK(t.positions[t.dest].x == doctest::Approx(160.0));
    CHECK(t.positions[t.dest].y == 0.0);
    // Rows sit symmetric around the axis; the outer first link spans
    // sqrt(40^2 + 80^2).
    double min_y = 0.0, max_y = 0.0;
    for (const auto& route : t.routes) {
        const auto& first = t.positions[route[1]];
        CHECK(first.x == doctest::Approx(40.0));
        min_y = std::min(min_y, first.y);
        max_y = std::max(max_y, first.y);
    }
    CHECK(min_y == doctest::Approx(-80.0));
    CHECK(max_y == doctest::Approx(80.0));
    CHECK(channel::distance(t.positions[t.source],
                            {40.0, 80.0}) == doctest::Approx(89.4427191));

    const auto single = sim::build_grid_topology(1, 1, 40.0, 80.0);
    CHECK(single.positions.size() == 2);
    CHECK(single.routes.size() == 1);
    CHECK(single.routes[0].size() == 2);
}

TEST_CASE("slot duration") {
    sim::SimConfig cfg;
    // (1500 + 40) bytes over 24 Mbit/s plus two 1 us propagation legs.
    CHECK(sim::slot_duration(cfg) ==
          doctest::Approx((1540.0 * 8.0) / 24e6 + 2e-6).epsilon(1e-12));
    cfg.packet_bytes = 1000;
    cfg.ack_bytes = 0;
    cfg.link_rate = 8e6;
    cfg.prop_delay = 0.0;
    CHECK(sim::slot_duration(cfg) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("identical seeds reproduce bit-identical runs") {
    const auto cfg = fast_forced_config(Scheme::NC, 3, 2, 0.3);
    const auto a = sim::run(cfg);
    const auto b = sim::run(cfg);
    CHECK(a.slots == b.slots);
    CHECK(a.delivered == b.delivered);
    CHECK(a.mean_delay_slots == b.mean_delay_slots);
    CHECK(a.pkt_drops == b.pkt_drops);
    CHECK(a.generated == b.generated);

    auto other = cfg;
    other.seed = cfg.seed + 1;
    const auto c = sim::run(other);
    CHECK(a.mean_delay_slots != c.mean_delay_slots);
}

TEST_CASE("packet conservation per scheme") {
    for (Scheme s : {Scheme::SP, Scheme::MP, Scheme::MC, Scheme::NC,
                     Scheme::G_NC}) {
        CAPTURE(to_string(s));
        const auto m = sim::run(fast_forced_config(s, 3, 2, 0.3));
        CHECK(m.completed);
        check_conservation(m);
        CHECK(m.slots > 0);
        CHECK(m.delivered >= 400);
    }
}

TEST_CASE("forced-error delay matches renewal theory") {
    // Single hop, saturated source, always-on transmissions: the slot
    // process is exactly the geometric race the closed forms describe.
    auto sp = fast_forced_config(Scheme::SP, 3, 1, 0.4);
    sp.stop_after = 20000;
    const auto m_sp = sim::run(sp);
    const double sigma_sp =
        m_sp.delay_stddev_slots / std::sqrt(double(m_sp.delay_samples));
    CHECK(std::abs(m_sp.mean_delay_slots - 1.0 / 0.6) <= 3.0 * sigma_sp);

    auto mc = fast_forced_config(Scheme::MC, 3, 1, 0.5);
    mc.stop_after = 20000;
    const auto m_mc = sim::run(mc);
    const double sigma_mc =
        m_mc.delay_stddev_slots / std::sqrt(double(m_mc.delay_samples));
    CHECK(std::abs(m_mc.mean_delay_slots - 8.0 / 7.0) <= 3.0 * sigma_mc);
    check_conservation(m_mc);
}

TEST_CASE("duplicate accounting with perfect links") {
    auto cfg = fast_forced_config(Scheme::MC, 3, 1, 0.0);
    cfg.stop_after = 500;
    const auto m = sim::run(cfg);
    CHECK(m.delivered == 500);
    CHECK(m.duplicate_deliveries == 1000);
    CHECK(m.mean_delay_slots == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.pkt_drops == 0);
    check_conservation(m);
}

TEST_CASE("decoded generations account for delivered packets") {
    auto cfg = fast_forced_config(Scheme::NC, 3, 2, 0.3);
    cfg.stop_after = 300;
    const auto m = sim::run(cfg);
    CHECK(m.delivered == m.generations_decoded * cfg.gen_size);
    CHECK(m.mean_interarrival > 0.0);
    check_conservation(m);
}

TEST_CASE("throughput and time bookkeeping") {
    auto cfg = fast_forced_config(Scheme::SP, 3, 2, 0.2);
    const auto m = sim::run(cfg);
    CHECK(m.sim_time ==
          doctest::Approx(m.slots * sim::slot_duration(cfg)).epsilon(1e-12));
    CHECK(m.throughput_bps ==
          doctest::Approx(m.delivered * cfg.packet_bytes * 8.0 / m.sim_time)
              .epsilon(1e-9));
    CHECK(m.mean_delay ==
          doctest::Approx(m.mean_delay_slots * sim::slot_duration(cfg))
              .epsilon(1e-12));
}

TEST_CASE("single-link reception follows the channel law") {
    sim::SimConfig cfg;
    cfg.topology = sim::build_grid_topology(1, 1, 40.0, 80.0);
    cfg.scheme = Scheme::SP;
    cfg.source_tx_prob = 1.0;
    cfg.contention_window = 0;
    cfg.flow_rate = 48e6;
    cfg.stop_after = 20000;
    cfg.seed = 5;
    cfg.channel.gamma = 20.0;
    cfg.channel.eta = 6.31335e-8;
    cfg.channel.alpha = 2.0;
    const auto m = sim::run(cfg);

    const std::vector<channel::Position> active = {
        cfg.topology.positions[cfg.topology.source]};
    const double p = channel::success_probability(
        0, cfg.topology.positions[cfg.topology.dest], active, cfg.channel);
    CHECK(p == doctest::Approx(0.98).epsilon(1e-3));

    const auto& link = m.link_stats.at({cfg.topology.source, cfg.topology.dest});
    const double observed = double(link.successes) / double(link.attempts);
    const double sigma = std::sqrt(p * (1.0 - p) / double(link.attempts));
    CHECK(std::abs(observed - p) <= 3.0 * sigma);
    // No competing transmitter: every failed reception is a pure SNR drop.
    CHECK(m.pkt_drops == m.snr_drops);
}

TEST_CASE("slot cap raises a timeout carrying partial results") {
    auto cfg = fast_forced_config(Scheme::SP, 3, 2, 0.3);
    cfg.stop_after = 1000000;
    cfg.slot_cap = 50;
    CHECK_THROWS_AS(sim::run(cfg), sim::SimTimeout);
    try {
        sim::run(cfg);
    } catch (const sim::SimTimeout& t) {
        CHECK_FALSE(t.partial.completed);
        CHECK(t.partial.slots == 50);
        CHECK(t.partial.delivered < 1000000);
        check_conservation(t.partial);
    }
}

TEST_CASE("config validation") {
    sim::SimConfig cfg;
    cfg.topology = sim::build_grid_topology(3, 2, 40.0, 80.0);
    cfg.scheme = Scheme::NC;
    cfg.gen_size = 5;  // more data packets than paths to carry them
    CHECK_THROWS_AS(sim::run(cfg), std::invalid_argument);

    auto bad = fast_forced_config(Scheme::SP, 2, 2, 0.3);
    bad.forced_error = {0.1, 0.2, 0.3};  // three entries for two paths
    CHECK_THROWS_AS(sim::run(bad), std::invalid_argument);
}

}  // TEST_SUITE
