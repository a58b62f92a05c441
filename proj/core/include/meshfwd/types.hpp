#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>

namespace meshfwd {

// Forwarding schemes. The NC_* variants differ only in how many coded
// packets the destination must collect; G_* are the greedy (ungated)
// network-coding variants used by the simulator.
enum class Scheme {
    SP,      // single path
    MP,      // multipath, one distinct packet per path
    MC,      // multicopy, same packet on every path
    NC,      // network coding, gated generations
    NC_L,    // network coding, decode after k coded packets
    NC_U,    // network coding, decode after k+1 coded packets
    G_NC,    // greedy network coding
    G_NC_L,
    G_NC_U,
};

std::string to_string(Scheme s);
std::optional<Scheme> scheme_from_string(const std::string& name);

// Result of one analytical evaluation of a scheme. Delay counts slots per
// delivered unit (packet, first copy, or generation); throughput is
// units_per_delivery / delay in packets per slot.
struct SchemeResult {
    double delay = 0.0;
    double throughput = 0.0;
    double units_per_delivery = 1.0;
    bool unreachable = false;  // some required link has error probability 1
    double delay_ratio_to_sp = std::numeric_limits<double>::quiet_NaN();
    double throughput_ratio_to_sp = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> aux;
};

using SchemeResults = std::map<Scheme, SchemeResult>;

// Marks a result set's ratios relative to its own SP row. SP ends up with
// both ratios exactly 1.0 by construction.
void fill_ratios_to_sp(SchemeResults& results);

inline constexpr double kInfiniteDelay = std::numeric_limits<double>::infinity();

}  // namespace meshfwd
