#include "meshfwd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace meshfwd::channel {

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double received_power_factor(const Position& tx, const Position& rx,
                             const ChannelParams& p) {
    const double r = distance(tx, rx);
    if (r <= 0.0) {
        throw std::invalid_argument("received_power_factor: coincident nodes");
    }
    return p.tx_power * std::pow(r, -p.alpha);
}

double success_probability(std::size_t tx, const Position& rx,
                           std::span<const Position> active,
                           const ChannelParams& p) {
    if (tx >= active.size()) {
        throw std::invalid_argument("success_probability: tx not in active set");
    }
    if (p.gamma < 0.0 || p.eta < 0.0 || p.fading_mean <= 0.0 || p.tx_power <= 0.0) {
        throw std::invalid_argument("success_probability: invalid channel parameters");
    }
    const double g_tx = received_power_factor(active[tx], rx, p);
    const double noise_exponent = p.gamma * p.eta / (p.fading_mean * g_tx);

    if (active.size() > 16) {
        double log_p = -noise_exponent;
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (k == tx) continue;
            const double g_k = received_power_factor(active[k], rx, p);
            log_p -= std::log1p(p.gamma * g_k / g_tx);
        }
        return std::exp(log_p);
    }

    double prob = std::exp(-noise_exponent);
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (k == tx) continue;
        const double g_k = received_power_factor(active[k], rx, p);
        prob /= 1.0 + p.gamma * g_k / g_tx;
    }
    return prob;
}

double link_error(std::size_t tx, const Position& rx,
                  std::span<const Position> active, const ChannelParams& p) {
    return 1.0 - success_probability(tx, rx, active, p);
}

}  // namespace meshfwd::channel
