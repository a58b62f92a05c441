#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "meshfwd/channel.hpp"
#include "meshfwd/types.hpp"

namespace meshfwd::sim {

// n parallel paths of m hops between one source and one destination. The
// source sits at the origin with one interface per path; the destination
// is at (m * hop_distance, 0). Path i's relays sit at x = j * hop_distance,
// y = (i - (n-1)/2) * path_spacing.
struct Topology {
    int paths = 1;
    int hops = 1;
    double hop_distance = 40.0;
    double path_spacing = 80.0;
    std::vector<channel::Position> positions;  // node id -> position
    std::vector<std::vector<int>> routes;      // per path: source ... dest
    int source = 0;
    int dest = 1;
};

Topology build_grid_topology(int paths, int hops, double hop_distance,
                             double path_spacing);

// Slotted-aloha forwarding simulator. Per slot: source interfaces transmit
// a queued packet with probability source_tx_prob; relays transmit when
// their uniform [0, cw] backoff (redrawn before every attempt) expires; no
// carrier sense. Receptions are decided by SINR threshold tests with fresh
// exponential fading per transmission (or by per-path coin flips in forced
// error mode). A transmitting node cannot receive. Hop ACKs are instant
// and error-free; retransmissions continue until success. MC and NC get an
// instant global ACK that purges obsolete packets network-wide once a
// packet is first delivered (MC) or a generation decodes (NC). Gated NC
// keeps a single generation in flight; greedy NC injects continuously.
struct SimConfig {
    Topology topology;
    Scheme scheme = Scheme::SP;
    int gen_size = 2;       // data packets per generation (coding schemes)
    int decode_needed = 0;  // coded packets to decode; 0 means gen_size
    double source_tx_prob = 0.2;
    int contention_window = 7;
    double link_rate = 24e6;     // bits/s
    int packet_bytes = 1500;
    int ack_bytes = 40;
    double prop_delay = 1e-6;    // seconds, one way
    channel::ChannelParams channel;
    double flow_rate = 9e6;      // offered load, bits/s
    long long stop_after = 2000; // delivered (or decoded) data packets
    std::uint64_t seed = 1;
    std::vector<double> forced_error;  // per-path erasure probs; empty = SINR
    long long slot_cap = 100'000'000;
    int queue_ref_size = 50;  // denominator for queue occupation ratios
};

// Data + ACK + two propagation delays, in seconds.
double slot_duration(const SimConfig& cfg);

struct LinkStats {
    long long attempts = 0;
    long long successes = 0;
};

struct SimMetrics {
    long long delivered = 0;            // data packets delivered or decoded
    long long generations_decoded = 0;  // coding schemes only
    long long delay_samples = 0;
    double mean_delay_slots = 0.0;
    double delay_stddev_slots = 0.0;
    double mean_delay = 0.0;            // seconds
    double throughput_bps = 0.0;
    double mean_interarrival = 0.0;     // seconds between coded arrivals (NC)
    long long pkt_drops = 0;            // failed receptions
    long long snr_drops = 0;            // would fail even without interference
    long long duplicate_deliveries = 0;
    long long slots = 0;
    double sim_time = 0.0;              // seconds
    std::vector<double> queue_occupation;  // per node, mean len / ref size
    std::map<std::pair<int, int>, LinkStats> link_stats;
    // Conservation counters over interface-level packets.
    long long generated = 0;
    long long delivered_receptions = 0;
    long long purged = 0;
    long long in_queue = 0;
    bool completed = false;
};

struct SimTimeout : std::runtime_error {
    explicit SimTimeout(SimMetrics partial_);
    SimMetrics partial;
};

// Runs until stop_after data packets are delivered (SP/MP), first copies
// arrive (MC), or decoded (NC); throws SimTimeout past slot_cap. Identical
// config and seed give identical metrics: every node draws from its own
// seeded stream in a fixed order.
SimMetrics run(const SimConfig& cfg);

// Copies cfg with SINR sampling replaced by fixed per-path erasures.
SimConfig forced_error_mode(SimConfig cfg, double e);
SimConfig forced_error_mode(SimConfig cfg, std::vector<double> per_path);

}  // namespace meshfwd::sim
