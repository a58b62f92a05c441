#include "meshfwd/closedform.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace meshfwd::closedform {

namespace {

constexpr unsigned kAllLinks = 0b111;

void check_entry(int link, unsigned active) {
    if (link < 1 || link > 3 || active == 0 || active > kAllLinks ||
        !(active & (1u << (link - 1)))) {
        throw std::invalid_argument("conditional error table: bad (link, active) pair");
    }
}

// 1 / (1 - x), or infinity once the renewal cannot complete.
double renewal_inverse(double x) {
    const double denom = 1.0 - x;
    if (denom <= 0.0) return kInfiniteDelay;
    return 1.0 / denom;
}

SchemeResult make_result(double delay, double units) {
    SchemeResult r;
    r.delay = delay;
    r.units_per_delivery = units;
    if (!std::isfinite(delay)) {
        r.unreachable = true;
        r.delay = kInfiniteDelay;
        r.throughput = 0.0;
    } else {
        r.throughput = units / delay;
    }
    return r;
}

double binomial(int n, int j) {
    double c = 1.0;
    for (int i = 1; i <= j; ++i) {
        c = c * (n - j + i) / i;
    }
    return c;
}

}  // namespace

void ConditionalErrorTable::set(int link, unsigned active, double error) {
    check_entry(link, active);
    if (error < 0.0 || error > 1.0) {
        throw std::invalid_argument("conditional error table: error outside [0,1]");
    }
    e_[link - 1][active] = error;
    set_[link - 1][active] = true;
}

double ConditionalErrorTable::error(int link, unsigned active) const {
    check_entry(link, active);
    if (!set_[link - 1][active]) {
        throw std::invalid_argument("conditional error table: entry not set");
    }
    return e_[link - 1][active];
}

bool ConditionalErrorTable::complete() const {
    for (unsigned active = 1; active <= kAllLinks; ++active) {
        for (int link = 1; link <= 3; ++link) {
            if ((active & (1u << (link - 1))) && !set_[link - 1][active]) {
                return false;
            }
        }
    }
    return true;
}

ConditionalErrorTable ConditionalErrorTable::uniform(double e) {
    ConditionalErrorTable t;
    for (unsigned active = 1; active <= kAllLinks; ++active) {
        for (int link = 1; link <= 3; ++link) {
            if (active & (1u << (link - 1))) t.set(link, active, e);
        }
    }
    return t;
}

ConditionalErrorTable ConditionalErrorTable::from_channel(
    const std::array<channel::Position, 3>& sources,
    const channel::Position& dest, const channel::ChannelParams& params) {
    ConditionalErrorTable t;
    for (unsigned active = 1; active <= kAllLinks; ++active) {
        std::vector<channel::Position> tx;
        std::vector<int> members;
        for (int link = 1; link <= 3; ++link) {
            if (active & (1u << (link - 1))) {
                tx.push_back(sources[link - 1]);
                members.push_back(link);
            }
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            t.set(members[i], active, channel::link_error(i, dest, tx, params));
        }
    }
    return t;
}

SchemeResults sinr_three_path(const ConditionalErrorTable& table) {
    if (!table.complete()) {
        throw std::invalid_argument("sinr_three_path: incomplete error table");
    }
    const auto solo = [&](int link) { return table.error(link, 1u << (link - 1)); };
    const auto pair_mask = [](int a, int b) {
        return (1u << (a - 1)) | (1u << (b - 1));
    };

    double e_full[4];
    for (int i = 1; i <= 3; ++i) e_full[i] = table.error(i, kAllLinks);

    SchemeResults out;

    // SP: the strongest stand-alone link, retried until success.
    int best = 1;
    for (int i = 2; i <= 3; ++i) {
        if (solo(i) < solo(best)) best = i;
    }
    out[Scheme::SP] = make_result(renewal_inverse(solo(best)), 1.0);

    // MC: identical copies on all three links, done at the first arrival.
    out[Scheme::MC] =
        make_result(renewal_inverse(e_full[1] * e_full[2] * e_full[3]), 1.0);

    // Shared first-slot outcome probabilities under all three active.
    const double p_none = e_full[1] * e_full[2] * e_full[3];
    double p_only[4];
    for (int i = 1; i <= 3; ++i) {
        p_only[i] = (1.0 - e_full[i]);
        for (int j = 1; j <= 3; ++j) {
            if (j != i) p_only[i] *= e_full[j];
        }
    }

    // NC: generation of two; after a single success the two remaining
    // links keep transmitting and any further arrival completes.
    {
        double acc = 1.0;
        bool finite = true;
        for (int i = 1; i <= 3; ++i) {
            const int a = (i == 1) ? 2 : 1;
            const int b = (i == 3) ? 2 : 3;
            const double ea = table.error(a, pair_mask(a, b));
            const double eb = table.error(b, pair_mask(a, b));
            const double residual = renewal_inverse(ea * eb);
            if (!std::isfinite(residual)) finite = false;
            acc += p_only[i] * residual;
        }
        const double denom = 1.0 - p_none;
        const double d_nc = (finite && denom > 0.0) ? acc / denom : kInfiniteDelay;
        out[Scheme::NC] = make_result(d_nc, 2.0);
    }

    // MP: all three distinct packets must arrive. Residuals condition on
    // the set of links still serving an undelivered packet.
    {
        double d_single[4];
        for (int i = 1; i <= 3; ++i) d_single[i] = renewal_inverse(solo(i));

        // d_pair[i]: delay with the two links other than i still active.
        double d_pair[4];
        bool finite = true;
        for (int i = 1; i <= 3; ++i) {
            const int a = (i == 1) ? 2 : 1;
            const int b = (i == 3) ? 2 : 3;
            const double ea = table.error(a, pair_mask(a, b));
            const double eb = table.error(b, pair_mask(a, b));
            const double denom = 1.0 - ea * eb;
            if (denom <= 0.0 || !std::isfinite(d_single[a]) ||
                !std::isfinite(d_single[b])) {
                finite = false;
                d_pair[i] = kInfiniteDelay;
                continue;
            }
            d_pair[i] =
                (1.0 + (1.0 - ea) * eb * d_single[b] + ea * (1.0 - eb) * d_single[a]) /
                denom;
        }

        double acc = 1.0;
        for (int i = 1; i <= 3; ++i) {
            // Exactly one failure, on link i.
            double q = e_full[i];
            for (int j = 1; j <= 3; ++j) {
                if (j != i) q *= (1.0 - e_full[j]);
            }
            if (!std::isfinite(d_single[i])) finite = false;
            acc += q * d_single[i];
            // Exactly one success, on link i.
            acc += p_only[i] * d_pair[i];
        }
        const double denom = 1.0 - p_none;
        const double d_batch = (finite && denom > 0.0) ? acc / denom : kInfiniteDelay;
        auto r = make_result(d_batch, 3.0);
        if (!r.unreachable) r.aux["per_packet_delay"] = d_batch / 3.0;
        out[Scheme::MP] = std::move(r);
    }

    fill_ratios_to_sp(out);
    return out;
}

SchemeResults hop_by_hop_three(double e) {
    if (e < 0.0 || e > 1.0) {
        throw std::invalid_argument("hop_by_hop_three: e outside [0,1]");
    }
    SchemeResults out;
    const double d_sp = renewal_inverse(e);
    out[Scheme::SP] = make_result(d_sp, 1.0);
    out[Scheme::MP] = make_result(d_sp, 3.0);
    out[Scheme::MC] = make_result(renewal_inverse(e * e * e), 1.0);

    const double e3 = e * e * e;
    const double d1 = renewal_inverse(e3);
    double d_nc = kInfiniteDelay;
    if (std::isfinite(d1)) {
        const double s = 1.0 - e;
        d_nc = (s * s * s + 3.0 * e * s * s + 3.0 * e * e * s * (1.0 + d1) + e3) /
               (1.0 - e3);
    }
    out[Scheme::NC] = make_result(d_nc, 2.0);
    fill_ratios_to_sp(out);
    return out;
}

double success_accumulation_delay(int links, int needed, double e) {
    if (links < 1 || needed < 0 || needed > links * 64) {
        throw std::invalid_argument("success_accumulation_delay: bad arguments");
    }
    if (e < 0.0 || e > 1.0) {
        throw std::invalid_argument("success_accumulation_delay: e outside [0,1]");
    }
    if (needed == 0) return 0.0;
    const double stay = std::pow(e, links);
    if (1.0 - stay <= 0.0) return kInfiniteDelay;

    std::vector<double> b(links + 1);
    for (int j = 0; j <= links; ++j) {
        b[j] = binomial(links, j) * std::pow(1.0 - e, j) * std::pow(e, links - j);
    }
    std::vector<double> t(needed + 1, 0.0);
    for (int r = 1; r <= needed; ++r) {
        double acc = 1.0;
        for (int j = 1; j <= links; ++j) {
            const int rest = r - j;
            if (rest > 0) acc += b[j] * t[rest];
        }
        t[r] = acc / (1.0 - stay);
    }
    return t[needed];
}

SchemeResults hop_by_hop_seven(double e) {
    if (e < 0.0 || e > 1.0) {
        throw std::invalid_argument("hop_by_hop_seven: e outside [0,1]");
    }
    SchemeResults out;
    const double d_sp = renewal_inverse(e);
    out[Scheme::SP] = make_result(d_sp, 1.0);
    out[Scheme::MP] = make_result(d_sp, 7.0);
    out[Scheme::MC] = make_result(renewal_inverse(std::pow(e, 7)), 1.0);
    out[Scheme::NC_L] = make_result(success_accumulation_delay(7, 3, e), 3.0);
    out[Scheme::NC_U] = make_result(success_accumulation_delay(7, 4, e), 3.0);
    fill_ratios_to_sp(out);
    return out;
}

SchemeResults heterogeneous_three(double e1, double e2, double e3) {
    for (double e : {e1, e2, e3}) {
        if (e < 0.0 || e > 1.0) {
            throw std::invalid_argument("heterogeneous_three: e outside [0,1]");
        }
    }
    const double e_min = std::min({e1, e2, e3});
    const double prod = e1 * e2 * e3;

    SchemeResults out;
    out[Scheme::SP] = make_result(renewal_inverse(e_min), 1.0);

    const double d1 = renewal_inverse(e1);
    const double d2 = renewal_inverse(e2);
    const double d3 = renewal_inverse(e3);
    const double d_mp = (d1 + d2 + d3) / 3.0;
    out[Scheme::MP] = make_result(d_mp, 3.0);

    out[Scheme::MC] = make_result(renewal_inverse(prod), 1.0);

    // NC over unequal links: conditioning does not change the error
    // probabilities, so only the first-slot outcome mix differs from the
    // uniform case. One more coded packet after two losses arrives in
    // 1/(1 - e1*e2*e3) slots on average.
    const double d_more = renewal_inverse(prod);
    double d_nc = kInfiniteDelay;
    if (std::isfinite(d_more)) {
        const double s1 = 1.0 - e1, s2 = 1.0 - e2, s3 = 1.0 - e3;
        const double all = s1 * s2 * s3;
        const double one_fail = e1 * s2 * s3 + e2 * s1 * s3 + e3 * s1 * s2;
        const double one_ok = s1 * e2 * e3 + s2 * e1 * e3 + s3 * e1 * e2;
        d_nc = (all + one_fail + one_ok * (1.0 + d_more) + prod) / (1.0 - prod);
    }
    out[Scheme::NC] = make_result(d_nc, 2.0);
    fill_ratios_to_sp(out);
    return out;
}

SchemeResults extend_hops(SchemeResults single_hop, int hops) {
    if (hops < 1) {
        throw std::invalid_argument("extend_hops: hops must be >= 1");
    }
    for (auto& [scheme, r] : single_hop) {
        if (r.unreachable) continue;
        r.delay *= hops;
        r.throughput = r.units_per_delivery / r.delay;
        if (auto it = r.aux.find("per_packet_delay"); it != r.aux.end()) {
            it->second *= hops;
        }
    }
    fill_ratios_to_sp(single_hop);
    return single_hop;
}

}  // namespace meshfwd::closedform
