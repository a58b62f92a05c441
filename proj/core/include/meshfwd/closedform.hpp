#pragma once

#include <array>

#include "meshfwd/channel.hpp"
#include "meshfwd/types.hpp"

namespace meshfwd::closedform {

// Conditional error probabilities for three parallel single-hop links that
// interfere with each other. error(link, active) is the probability that
// `link` fails while exactly the links in `active` transmit in the same
// slot. Links are numbered 1..3; `active` is a bitmask with bit (link-1).
class ConditionalErrorTable {
public:
    void set(int link, unsigned active, double error);
    double error(int link, unsigned active) const;
    bool complete() const;  // every (link, active) pair with link in active

    // Interference-insensitive table: every entry equals e.
    static ConditionalErrorTable uniform(double e);

    // Table derived from the SINR model for three transmitters and one
    // common receiver.
    static ConditionalErrorTable from_channel(
        const std::array<channel::Position, 3>& sources,
        const channel::Position& dest, const channel::ChannelParams& params);

private:
    double e_[3][8] = {};
    bool set_[3][8] = {};
};

// Three single-hop paths whose per-slot outcomes are coupled through the
// conditional error table. Senders stay active until their own unit is
// delivered, so the residual regimes condition on the set of links still
// transmitting. Delays are renewal fixed points of the slot recursion
// D = sum over first-slot outcomes of p * (1 + residual), residual 0 on
// completion. MP's delay is the time to deliver the whole three-packet
// batch (aux "per_packet_delay" carries the amortized value); NC uses
// generations of two packets.
SchemeResults sinr_three_path(const ConditionalErrorTable& table);

// Three parallel links with relaying nodes that re-encode at every hop,
// all links sharing one error probability e and staying active until the
// two-packet generation is decodable. One extra coded packet is needed
// after two losses; waiting for it takes 1/(1-e^3) slots.
SchemeResults hop_by_hop_three(double e);

// Seven-link variant carrying generations of three packets. Decoding needs
// at least three and at most four coded packets, reported as NC_L and NC_U.
SchemeResults hop_by_hop_seven(double e);

// Expected slots until `needed` successes accumulate when `links` parallel
// links each succeed independently with probability 1-e per slot and every
// success counts. This is the residual-delay law behind hop_by_hop_seven.
double success_accumulation_delay(int links, int needed, double e);

// Three single-hop paths with distinct, interference-free error
// probabilities. MP's delay is the per-packet average across the paths.
SchemeResults heterogeneous_three(double e1, double e2, double e3);

// Chains `hops` identical segments: delay scales by hops, throughput is
// recomputed from the scaled delay, ratios are refreshed.
SchemeResults extend_hops(SchemeResults single_hop, int hops);

}  // namespace meshfwd::closedform
