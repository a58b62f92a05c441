#include "meshfwd/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "meshfwd/rng.hpp"

namespace meshfwd::sim {

Topology build_grid_topology(int paths, int hops, double hop_distance,
                             double path_spacing) {
    if (paths < 1 || hops < 1 || hop_distance <= 0.0) {
        throw std::invalid_argument("build_grid_topology: bad dimensions");
    }
    if (paths > 1 && hops > 1 && path_spacing <= 0.0) {
        throw std::invalid_argument("build_grid_topology: relays need positive spacing");
    }
    Topology t;
    t.paths = paths;
    t.hops = hops;
    t.hop_distance = hop_distance;
    t.path_spacing = path_spacing;
    t.positions.push_back({0.0, 0.0});                      // source
    t.positions.push_back({hops * hop_distance, 0.0});      // destination
    t.routes.assign(paths, {});
    for (int i = 0; i < paths; ++i) {
        const double y = (i - (paths - 1) / 2.0) * path_spacing;
        auto& route = t.routes[i];
        route.push_back(t.source);
        for (int j = 1; j < hops; ++j) {
            route.push_back(static_cast<int>(t.positions.size()));
            t.positions.push_back({j * hop_distance, y});
        }
        route.push_back(t.dest);
    }
    return t;
}

double slot_duration(const SimConfig& cfg) {
    return (cfg.packet_bytes + cfg.ack_bytes) * 8.0 / cfg.link_rate +
           2.0 * cfg.prop_delay;
}

SimTimeout::SimTimeout(SimMetrics partial_)
    : std::runtime_error("simulation exceeded its slot cap"),
      partial(std::move(partial_)) {}

SimConfig forced_error_mode(SimConfig cfg, double e) {
    const auto paths = static_cast<std::size_t>(cfg.topology.paths);
    return forced_error_mode(std::move(cfg), std::vector<double>(paths, e));
}

SimConfig forced_error_mode(SimConfig cfg, std::vector<double> per_path) {
    if (per_path.size() != static_cast<std::size_t>(cfg.topology.paths)) {
        throw std::invalid_argument("forced_error_mode: one probability per path");
    }
    cfg.forced_error = std::move(per_path);
    return cfg;
}

namespace {

struct Packet {
    long long id = 0;  // data sequence, or generation id for coding schemes
    int path = 0;
    long long first_tx = -1;
};

struct Welford {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double stddev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

bool is_coding(Scheme s) {
    switch (s) {
        case Scheme::NC:
        case Scheme::NC_L:
        case Scheme::NC_U:
        case Scheme::G_NC:
        case Scheme::G_NC_L:
        case Scheme::G_NC_U:
            return true;
        default:
            return false;
    }
}

bool is_greedy(Scheme s) {
    return s == Scheme::G_NC || s == Scheme::G_NC_L || s == Scheme::G_NC_U;
}

int default_decode_needed(Scheme s, int gen_size) {
    if (s == Scheme::NC_U || s == Scheme::G_NC_U) return gen_size + 1;
    return gen_size;
}

struct Transmission {
    int index = 0;
    int node = 0;   // transmitting node
    int iface = -1; // source interface (path index), -1 for relays
    int path = 0;
    int to = 0;
    Packet pkt;
    bool success = false;
    bool snr_fail = false;
    bool busy_fail = false;
    double sinr = 0.0;
};

struct RelayRole {
    int path = -1;
    int next = -1;
};

class Engine {
public:
    explicit Engine(const SimConfig& cfg) : cfg_(cfg) { init(); }

    SimMetrics run() {
        while (true) {
            step();
            ++slot_;
            if (delivered_ >= cfg_.stop_after) {
                completed_ = true;
                break;
            }
            if (slot_ >= cfg_.slot_cap) {
                throw SimTimeout(finalize());
            }
        }
        return finalize();
    }

private:
    void init() {
        const auto& topo = cfg_.topology;
        n_ = topo.paths;
        node_count_ = static_cast<int>(topo.positions.size());
        if (n_ < 1 || topo.hops < 1 || node_count_ < 2 ||
            topo.routes.size() != static_cast<std::size_t>(n_)) {
            throw std::invalid_argument("sim: malformed topology");
        }
        roles_.assign(node_count_, RelayRole{});
        for (int p = 0; p < n_; ++p) {
            const auto& route = topo.routes[p];
            if (route.size() < 2 || route.front() != topo.source ||
                route.back() != topo.dest) {
                throw std::invalid_argument("sim: malformed route");
            }
            for (std::size_t i = 0; i + 1 < route.size(); ++i) {
                const int node = route[i];
                if (node < 0 || node >= node_count_) {
                    throw std::invalid_argument("sim: route node out of range");
                }
                if (i > 0) {
                    if (roles_[node].path >= 0) {
                        throw std::invalid_argument("sim: relay shared between paths");
                    }
                    roles_[node] = {p, route[i + 1]};
                }
            }
        }
        if (cfg_.source_tx_prob < 0.0 || cfg_.source_tx_prob > 1.0 ||
            cfg_.contention_window < 0 || cfg_.link_rate <= 0.0 ||
            cfg_.packet_bytes <= 0 || cfg_.ack_bytes < 0 ||
            cfg_.prop_delay < 0.0 || cfg_.flow_rate <= 0.0 ||
            cfg_.stop_after < 1 || cfg_.slot_cap < 1 || cfg_.queue_ref_size < 1) {
            throw std::invalid_argument("sim: bad configuration value");
        }
        if (!cfg_.forced_error.empty()) {
            if (cfg_.forced_error.size() != static_cast<std::size_t>(n_)) {
                throw std::invalid_argument("sim: forced_error needs one entry per path");
            }
            for (double e : cfg_.forced_error) {
                if (e < 0.0 || e > 1.0) {
                    throw std::invalid_argument("sim: forced_error outside [0,1]");
                }
            }
        }
        coding_ = is_coding(cfg_.scheme);
        greedy_ = is_greedy(cfg_.scheme);
        if (coding_) {
            if (cfg_.gen_size < 1) {
                throw std::invalid_argument("sim: generation size must be >= 1");
            }
            needed_ = cfg_.decode_needed > 0
                          ? cfg_.decode_needed
                          : default_decode_needed(cfg_.scheme, cfg_.gen_size);
            if (needed_ < 1 || needed_ > n_) {
                throw std::invalid_argument("sim: decode threshold outside [1, paths]");
            }
        }

        if (cfg_.forced_error.empty()) {
            const auto& ch = cfg_.channel;
            if (ch.gamma < 0.0 || ch.eta < 0.0 || ch.fading_mean <= 0.0 ||
                ch.tx_power <= 0.0) {
                throw std::invalid_argument("sim: bad channel parameters");
            }
            gain_.assign(static_cast<std::size_t>(node_count_) * node_count_, 0.0);
            for (int a = 0; a < node_count_; ++a) {
                for (int b = 0; b < node_count_; ++b) {
                    if (a == b) continue;
                    gain_[a * node_count_ + b] = channel::received_power_factor(
                        topo.positions[a], topo.positions[b], ch);
                }
            }
        }

        fading_.reserve(node_count_);
        backoff_stream_.reserve(node_count_);
        for (int i = 0; i < node_count_; ++i) {
            fading_.emplace_back(cfg_.seed, static_cast<std::uint64_t>(i));
            backoff_stream_.emplace_back(cfg_.seed,
                                         static_cast<std::uint64_t>(node_count_ + i));
        }
        srctx_.reserve(n_);
        for (int p = 0; p < n_; ++p) {
            srctx_.emplace_back(cfg_.seed,
                                static_cast<std::uint64_t>(2 * node_count_ + p));
        }

        iface_q_.assign(n_, {});
        relay_q_.assign(node_count_, {});
        backoff_.assign(node_count_, 0);
        armed_.assign(node_count_, false);
        occ_sum_.assign(node_count_, 0.0);

        const double t_slot = slot_duration(cfg_);
        arrivals_per_slot_ = cfg_.flow_rate * t_slot / (cfg_.packet_bytes * 8.0);
        arrival_acc_ = 1.0;  // first packet is available in slot 0
        sp_path_ = (n_ - 1) / 2;
    }

    void dispatch_arrivals() {
        arrival_acc_ += arrivals_per_slot_;
        while (arrival_acc_ >= 1.0) {
            arrival_acc_ -= 1.0;
            const long long seq = next_seq_++;
            switch (cfg_.scheme) {
                case Scheme::SP:
                    iface_q_[sp_path_].push_back({seq, sp_path_});
                    ++generated_;
                    break;
                case Scheme::MP: {
                    const int p = static_cast<int>(seq % n_);
                    iface_q_[p].push_back({seq, p});
                    ++generated_;
                    break;
                }
                case Scheme::MC:
                    for (int p = 0; p < n_; ++p) {
                        iface_q_[p].push_back({seq, p});
                        ++generated_;
                    }
                    break;
                default:  // coding schemes buffer data packets
                    ++data_buffer_;
                    break;
            }
        }
        if (coding_) {
            while (data_buffer_ >= cfg_.gen_size &&
                   (greedy_ || !generation_outstanding_)) {
                data_buffer_ -= cfg_.gen_size;
                const long long gid = next_generation_++;
                for (int p = 0; p < n_; ++p) {
                    iface_q_[p].push_back({gid, p});
                    ++generated_;
                }
                gen_paths_[gid] = 0;
                generation_outstanding_ = true;
            }
        }
    }

    void select_transmitters(std::vector<Transmission>& txs) {
        for (int p = 0; p < n_; ++p) {
            if (iface_q_[p].empty()) continue;
            if (!srctx_[p].bernoulli(cfg_.source_tx_prob)) continue;
            Packet& head = iface_q_[p].front();
            if (head.first_tx < 0) {
                head.first_tx = slot_;
                if (cfg_.scheme == Scheme::MC) {
                    seq_first_tx_.try_emplace(head.id, slot_);
                } else if (coding_) {
                    gen_first_tx_.try_emplace(head.id, slot_);
                }
            }
            Transmission t;
            t.node = cfg_.topology.source;
            t.iface = p;
            t.path = p;
            t.to = cfg_.topology.routes[p][1];
            t.pkt = head;
            txs.push_back(t);
        }
        for (int node = 0; node < node_count_; ++node) {
            if (roles_[node].path < 0) continue;
            auto& q = relay_q_[node];
            if (q.empty()) {
                armed_[node] = false;
                continue;
            }
            if (!armed_[node]) {
                backoff_[node] = backoff_stream_[node].uniform_int(cfg_.contention_window);
                armed_[node] = true;
            }
            if (backoff_[node] > 0) {
                --backoff_[node];
                continue;
            }
            Transmission t;
            t.node = node;
            t.path = roles_[node].path;
            t.to = roles_[node].next;
            t.pkt = q.front();
            txs.push_back(t);
        }
        for (std::size_t i = 0; i < txs.size(); ++i) {
            txs[i].index = static_cast<int>(i);
        }
    }

    void decide_outcomes(std::vector<Transmission>& txs) {
        std::vector<char> transmitting(node_count_, 0);
        for (const auto& t : txs) transmitting[t.node] = 1;

        if (!cfg_.forced_error.empty()) {
            for (auto& t : txs) {
                if (transmitting[t.to]) {
                    t.busy_fail = true;
                    continue;
                }
                t.success = !fading_[t.to].bernoulli(cfg_.forced_error[t.path]);
            }
        } else {
            std::vector<char> is_receiver(node_count_, 0);
            for (const auto& t : txs) {
                if (transmitting[t.to]) continue;
                is_receiver[t.to] = 1;
            }
            std::vector<double> a(txs.size());
            const auto& ch = cfg_.channel;
            for (int j = 0; j < node_count_; ++j) {
                if (!is_receiver[j]) continue;
                double total = 0.0;
                for (std::size_t i = 0; i < txs.size(); ++i) {
                    a[i] = fading_[j].exponential(ch.fading_mean) *
                           gain_[txs[i].node * node_count_ + j];
                    total += a[i];
                }
                for (auto& t : txs) {
                    if (t.to != j) continue;
                    const double signal = a[t.index];
                    const double interference = total - signal;
                    t.sinr = signal / (ch.eta + interference);
                    t.success = t.sinr >= ch.gamma;
                    if (!t.success) {
                        t.snr_fail = ch.eta > 0.0 && signal < ch.gamma * ch.eta;
                    }
                }
            }
            for (auto& t : txs) {
                if (transmitting[t.to]) t.busy_fail = true;
            }
        }

        // A relay locks onto one packet per slot; the destination has one
        // interface per path and takes them all.
        for (int j = 0; j < node_count_; ++j) {
            if (roles_[j].path < 0) continue;
            int best = -1;
            for (auto& t : txs) {
                if (t.to != j || !t.success) continue;
                if (best < 0 || t.sinr > txs[best].sinr) best = t.index;
            }
            for (auto& t : txs) {
                if (t.to == j && t.success && t.index != best) {
                    t.success = false;
                    t.busy_fail = true;
                }
            }
        }
    }

    void resolve(std::vector<Transmission>& txs) {
        for (auto& t : txs) {
            auto& stats = metrics_.link_stats[{t.node, t.to}];
            ++stats.attempts;
            if (!t.success) {
                ++metrics_.pkt_drops;
                if (t.snr_fail) ++metrics_.snr_drops;
                if (t.iface < 0) armed_[t.node] = false;  // fresh backoff
                continue;
            }
            ++stats.successes;
            if (t.iface >= 0) {
                iface_q_[t.iface].pop_front();
            } else {
                relay_q_[t.node].pop_front();
                armed_[t.node] = false;
            }
            if (t.to == cfg_.topology.dest) {
                deliver(t.pkt);
            } else {
                relay_q_[t.to].push_back(t.pkt);
            }
        }
    }

    void deliver(const Packet& pkt) {
        ++delivered_receptions_;
        switch (cfg_.scheme) {
            case Scheme::SP:
            case Scheme::MP:
                ++delivered_;
                delay_.add(static_cast<double>(slot_ - pkt.first_tx + 1));
                break;
            case Scheme::MC: {
                if (mc_done_.count(pkt.id)) {
                    ++metrics_.duplicate_deliveries;
                    break;
                }
                mc_done_.insert(pkt.id);
                ++delivered_;
                const auto it = seq_first_tx_.find(pkt.id);
                delay_.add(static_cast<double>(slot_ - it->second + 1));
                seq_first_tx_.erase(it);
                purge_ids_.push_back(pkt.id);
                break;
            }
            default: {  // coding schemes
                if (last_coded_rx_ >= 0) {
                    interarrival_.add(static_cast<double>(slot_ - last_coded_rx_));
                }
                last_coded_rx_ = slot_;
                const auto it = gen_paths_.find(pkt.id);
                if (it == gen_paths_.end()) {
                    ++metrics_.duplicate_deliveries;
                    break;
                }
                const std::uint32_t bit = 1u << pkt.path;
                if (it->second & bit) {
                    ++metrics_.duplicate_deliveries;
                    break;
                }
                it->second |= bit;
                if (std::popcount(it->second) >= needed_) {
                    ++metrics_.generations_decoded;
                    delivered_ += cfg_.gen_size;
                    const auto ft = gen_first_tx_.find(pkt.id);
                    delay_.add(static_cast<double>(slot_ - ft->second + 1));
                    gen_first_tx_.erase(ft);
                    gen_paths_.erase(it);
                    purge_ids_.push_back(pkt.id);
                    generation_outstanding_ = false;
                }
                break;
            }
        }
    }

    void apply_purges() {
        if (purge_ids_.empty()) return;
        for (long long id : purge_ids_) {
            for (auto& q : iface_q_) {
                metrics_.purged += erase_id(q, id);
            }
            for (int node = 0; node < node_count_; ++node) {
                if (roles_[node].path < 0) continue;
                const long long removed = erase_id(relay_q_[node], id);
                if (removed > 0) {
                    metrics_.purged += removed;
                    armed_[node] = false;
                }
            }
        }
        purge_ids_.clear();
    }

    static long long erase_id(std::deque<Packet>& q, long long id) {
        const auto old_size = q.size();
        q.erase(std::remove_if(q.begin(), q.end(),
                               [id](const Packet& p) { return p.id == id; }),
                q.end());
        return static_cast<long long>(old_size - q.size());
    }

    void sample_queues() {
        double src = 0.0;
        for (const auto& q : iface_q_) src += static_cast<double>(q.size());
        occ_sum_[cfg_.topology.source] += src;
        for (int node = 0; node < node_count_; ++node) {
            if (roles_[node].path >= 0) {
                occ_sum_[node] += static_cast<double>(relay_q_[node].size());
            }
        }
    }

    void step() {
        dispatch_arrivals();
        std::vector<Transmission> txs;
        select_transmitters(txs);
        if (!txs.empty()) {
            decide_outcomes(txs);
            resolve(txs);
            apply_purges();
        }
        sample_queues();
    }

    SimMetrics finalize() {
        SimMetrics m = metrics_;
        const double t_slot = slot_duration(cfg_);
        m.delivered = delivered_;
        m.generations_decoded = generations_decoded();
        m.delay_samples = delay_.n;
        m.mean_delay_slots = delay_.mean;
        m.delay_stddev_slots = delay_.stddev();
        m.mean_delay = delay_.mean * t_slot;
        m.slots = slot_;
        m.sim_time = slot_ * t_slot;
        m.throughput_bps =
            m.sim_time > 0.0
                ? static_cast<double>(delivered_) * cfg_.packet_bytes * 8.0 / m.sim_time
                : 0.0;
        m.mean_interarrival = coding_ && interarrival_.n > 0
                                  ? interarrival_.mean * t_slot
                                  : std::numeric_limits<double>::quiet_NaN();
        m.queue_occupation.assign(node_count_, 0.0);
        if (slot_ > 0) {
            for (int i = 0; i < node_count_; ++i) {
                m.queue_occupation[i] = occ_sum_[i] / slot_ / cfg_.queue_ref_size;
            }
        }
        m.generated = generated_;
        m.delivered_receptions = delivered_receptions_;
        long long in_queue = 0;
        for (const auto& q : iface_q_) in_queue += static_cast<long long>(q.size());
        for (int node = 0; node < node_count_; ++node) {
            if (roles_[node].path >= 0) {
                in_queue += static_cast<long long>(relay_q_[node].size());
            }
        }
        m.in_queue = in_queue;
        m.completed = completed_;
        return m;
    }

    long long generations_decoded() const { return metrics_.generations_decoded; }

    SimConfig cfg_;
    int n_ = 0;
    int node_count_ = 0;
    int sp_path_ = 0;
    bool coding_ = false;
    bool greedy_ = false;
    int needed_ = 0;

    std::vector<RelayRole> roles_;
    std::vector<double> gain_;
    std::vector<rng::Stream> fading_, backoff_stream_, srctx_;
    std::vector<std::deque<Packet>> iface_q_, relay_q_;
    std::vector<int> backoff_;
    std::vector<char> armed_;
    std::vector<double> occ_sum_;

    double arrivals_per_slot_ = 0.0;
    double arrival_acc_ = 0.0;
    long long next_seq_ = 0;
    long long data_buffer_ = 0;
    long long next_generation_ = 0;
    bool generation_outstanding_ = false;

    long long slot_ = 0;
    long long delivered_ = 0;
    long long generated_ = 0;
    long long delivered_receptions_ = 0;
    bool completed_ = false;

    Welford delay_, interarrival_;
    long long last_coded_rx_ = -1;

    std::unordered_set<long long> mc_done_;
    std::unordered_map<long long, long long> seq_first_tx_, gen_first_tx_;
    std::unordered_map<long long, std::uint32_t> gen_paths_;
    std::vector<long long> purge_ids_;

    SimMetrics metrics_;
};

}  // namespace

SimMetrics run(const SimConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

}  // namespace meshfwd::sim
