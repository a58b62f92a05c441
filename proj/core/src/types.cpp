#include "meshfwd/types.hpp"

namespace meshfwd {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::SP: return "SP";
        case Scheme::MP: return "MP";
        case Scheme::MC: return "MC";
        case Scheme::NC: return "NC";
        case Scheme::NC_L: return "NC-L";
        case Scheme::NC_U: return "NC-U";
        case Scheme::G_NC: return "G-NC";
        case Scheme::G_NC_L: return "G-NC-L";
        case Scheme::G_NC_U: return "G-NC-U";
    }
    return "?";
}

std::optional<Scheme> scheme_from_string(const std::string& name) {
    if (name == "SP") return Scheme::SP;
    if (name == "MP") return Scheme::MP;
    if (name == "MC") return Scheme::MC;
    if (name == "NC") return Scheme::NC;
    if (name == "NC-L") return Scheme::NC_L;
    if (name == "NC-U") return Scheme::NC_U;
    if (name == "G-NC") return Scheme::G_NC;
    if (name == "G-NC-L") return Scheme::G_NC_L;
    if (name == "G-NC-U") return Scheme::G_NC_U;
    return std::nullopt;
}

void fill_ratios_to_sp(SchemeResults& results) {
    auto sp = results.find(Scheme::SP);
    if (sp == results.end()) return;
    const double d_sp = sp->second.delay;
    const double t_sp = sp->second.throughput;
    for (auto& [scheme, r] : results) {
        if (scheme == Scheme::SP) {
            r.delay_ratio_to_sp = 1.0;
            r.throughput_ratio_to_sp = 1.0;
        } else {
            r.delay_ratio_to_sp = r.delay / d_sp;
            r.throughput_ratio_to_sp = t_sp > 0 ? r.throughput / t_sp
                                                : std::numeric_limits<double>::quiet_NaN();
        }
    }
}

}  // namespace meshfwd
