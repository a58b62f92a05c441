#pragma once

#include <cstddef>
#include <span>

namespace meshfwd::channel {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

// Narrowband interference-limited link model. A transmission from i to j
// succeeds when SINR(i,j) = P_rx(i,j) / (eta + sum of concurrent P_rx(k,j))
// reaches the threshold gamma. Received powers are A * g with g the
// deterministic path gain and A an exponential fading gain of mean
// fading_mean, drawn independently per transmission.
struct ChannelParams {
    double gamma = 1.0;        // SINR decoding threshold, linear scale
    double eta = 0.0;          // noise power at the receiver, watts
    double alpha = 2.0;        // path loss exponent
    double tx_power = 0.1;     // transmit power, watts
    double fading_mean = 1.0;  // mean of the exponential fading gain
};

// Deterministic path gain g(i,j) = tx_power * r^-alpha. Requires r > 0.
double received_power_factor(const Position& tx, const Position& rx,
                             const ChannelParams& p);

// Probability that rx decodes transmitter `tx` while all of `active`
// transmit in the same slot. `active` holds the positions of every
// concurrent transmitter including tx itself (tx indexes into it); the
// receiver must not be transmitting. Averaging the SINR threshold test
// over the exponential fading gains gives the closed form
//
//   p = exp(-gamma*eta / (v*g_tx)) * prod_{k != tx} (1 + gamma*g_k/g_tx)^-1
//
// with v = fading_mean and g_* the deterministic path gains toward rx.
// The product runs in log space once the active set grows past 16 nodes.
double success_probability(std::size_t tx, const Position& rx,
                           std::span<const Position> active,
                           const ChannelParams& p);

// 1 - success_probability.
double link_error(std::size_t tx, const Position& rx,
                  std::span<const Position> active, const ChannelParams& p);

}  // namespace meshfwd::channel
