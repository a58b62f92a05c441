#include "meshfwd/report.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "meshfwd/closedform.hpp"
#include "meshfwd/markov.hpp"
#include "meshfwd/simulator.hpp"

namespace meshfwd::report {

using nlohmann::json;

std::string to_string(Engine e) {
    switch (e) {
        case Engine::ClosedformSinr: return "closedform-sinr";
        case Engine::ClosedformHbh: return "closedform-hbh";
        case Engine::ClosedformHetero: return "closedform-hetero";
        case Engine::Markov: return "markov";
        case Engine::Simulate: return "simulate";
    }
    return "unknown";
}

std::optional<Engine> engine_from_string(const std::string& name) {
    if (name == "closedform-sinr") return Engine::ClosedformSinr;
    if (name == "closedform-hbh") return Engine::ClosedformHbh;
    if (name == "closedform-hetero") return Engine::ClosedformHetero;
    if (name == "markov") return Engine::Markov;
    if (name == "simulate") return Engine::Simulate;
    return std::nullopt;
}

namespace {

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

[[noreturn]] void schema_fail(const std::string& origin, const std::string& path,
                              const std::string& msg) {
    throw SchemaError(origin + ": " + path + ": " + msg);
}

void check_keys(const json& obj, const std::string& origin, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) schema_fail(origin, path, "unknown key '" + it.key() + "'");
    }
}

const json* opt_key(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double opt_number(const json& obj, const std::string& origin,
                  const std::string& path, const char* key, double def) {
    const json* v = opt_key(obj, key);
    if (!v) return def;
    if (!v->is_number()) schema_fail(origin, path + "." + key, "expected a number");
    return v->get<double>();
}

long long opt_integer(const json& obj, const std::string& origin,
                      const std::string& path, const char* key, long long def) {
    const json* v = opt_key(obj, key);
    if (!v) return def;
    if (!v->is_number_integer()) {
        schema_fail(origin, path + "." + key, "expected an integer");
    }
    return v->get<long long>();
}

bool opt_bool(const json& obj, const std::string& origin, const std::string& path,
              const char* key, bool def) {
    const json* v = opt_key(obj, key);
    if (!v) return def;
    if (!v->is_boolean()) schema_fail(origin, path + "." + key, "expected a boolean");
    return v->get<bool>();
}

std::string need_string(const json& obj, const std::string& origin,
                        const std::string& path, const char* key) {
    const json* v = opt_key(obj, key);
    if (!v) schema_fail(origin, path, std::string("missing required key '") + key + "'");
    if (!v->is_string()) schema_fail(origin, path + "." + key, "expected a string");
    return v->get<std::string>();
}

channel::Position parse_position(const json& v, const std::string& origin,
                                 const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        schema_fail(origin, path, "expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

bool is_coding_scheme(Scheme s) {
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

bool is_greedy_scheme(Scheme s) {
    return s == Scheme::G_NC || s == Scheme::G_NC_L || s == Scheme::G_NC_U;
}

void parse_params(Scenario& s, const json& params, const std::string& origin) {
    const std::string path = "$.params";
    check_keys(params, origin, path,
               {"paths", "hops", "gen_size", "error", "errors", "strict_paths",
                "state_budget"});
    s.paths = static_cast<int>(opt_integer(params, origin, path, "paths", s.paths));
    s.hops = static_cast<int>(opt_integer(params, origin, path, "hops", s.hops));
    s.gen_size =
        static_cast<int>(opt_integer(params, origin, path, "gen_size", s.gen_size));
    if (s.paths < 1) schema_fail(origin, path + ".paths", "must be >= 1");
    if (s.hops < 1) schema_fail(origin, path + ".hops", "must be >= 1");
    if (s.gen_size < 1) schema_fail(origin, path + ".gen_size", "must be >= 1");
    if (const json* v = opt_key(params, "error")) {
        if (!v->is_number()) schema_fail(origin, path + ".error", "expected a number");
        s.error = v->get<double>();
        s.has_error = true;
        if (s.error < 0.0 || s.error > 1.0) {
            schema_fail(origin, path + ".error", "must lie in [0,1]");
        }
    }
    if (const json* v = opt_key(params, "errors")) {
        if (!v->is_array()) {
            schema_fail(origin, path + ".errors", "expected an array of numbers");
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& item = (*v)[i];
            if (!item.is_number()) {
                schema_fail(origin, path + ".errors[" + std::to_string(i) + "]",
                            "expected a number");
            }
            const double e = item.get<double>();
            if (e < 0.0 || e > 1.0) {
                schema_fail(origin, path + ".errors[" + std::to_string(i) + "]",
                            "must lie in [0,1]");
            }
            s.errors.push_back(e);
        }
    }
    s.strict_paths = opt_bool(params, origin, path, "strict_paths", false);
    const long long budget =
        opt_integer(params, origin, path, "state_budget",
                    static_cast<long long>(s.state_budget));
    if (budget < 1) schema_fail(origin, path + ".state_budget", "must be >= 1");
    s.state_budget = static_cast<std::uint64_t>(budget);
}

void parse_channel(Scenario& s, const json& ch, const std::string& origin) {
    const std::string path = "$.channel";
    check_keys(ch, origin, path, {"gamma", "eta", "alpha", "tx_power", "fading_mean"});
    s.channel.gamma = opt_number(ch, origin, path, "gamma", s.channel.gamma);
    s.channel.eta = opt_number(ch, origin, path, "eta", s.channel.eta);
    s.channel.alpha = opt_number(ch, origin, path, "alpha", s.channel.alpha);
    s.channel.tx_power = opt_number(ch, origin, path, "tx_power", s.channel.tx_power);
    s.channel.fading_mean =
        opt_number(ch, origin, path, "fading_mean", s.channel.fading_mean);
    if (s.channel.gamma < 0.0) schema_fail(origin, path + ".gamma", "must be >= 0");
    if (s.channel.eta < 0.0) schema_fail(origin, path + ".eta", "must be >= 0");
    if (s.channel.alpha <= 0.0) schema_fail(origin, path + ".alpha", "must be > 0");
    if (s.channel.tx_power <= 0.0) {
        schema_fail(origin, path + ".tx_power", "must be > 0");
    }
    if (s.channel.fading_mean <= 0.0) {
        schema_fail(origin, path + ".fading_mean", "must be > 0");
    }
    s.has_channel = true;
}

void parse_geometry(Scenario& s, const json& geo, const std::string& origin) {
    const std::string path = "$.geometry";
    check_keys(geo, origin, path, {"sources", "dest"});
    const json* sources = opt_key(geo, "sources");
    if (!sources) schema_fail(origin, path, "missing required key 'sources'");
    if (!sources->is_array() || sources->size() != 3) {
        schema_fail(origin, path + ".sources", "expected exactly 3 positions");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        s.sources[i] = parse_position((*sources)[i], origin,
                                      path + ".sources[" + std::to_string(i) + "]");
    }
    const json* dest = opt_key(geo, "dest");
    if (!dest) schema_fail(origin, path, "missing required key 'dest'");
    s.dest = parse_position(*dest, origin, path + ".dest");
    s.has_geometry = true;
}

void parse_sim(Scenario& s, const json& sm, const std::string& origin) {
    const std::string path = "$.sim";
    check_keys(sm, origin, path,
               {"repetitions", "seed", "hop_distance", "path_spacing",
                "source_tx_prob", "contention_window", "link_rate", "packet_bytes",
                "ack_bytes", "prop_delay", "flow_rate", "stop_after", "slot_cap",
                "queue_ref_size", "decode_needed", "forced_error"});
    auto& c = s.sim;
    c.repetitions =
        static_cast<int>(opt_integer(sm, origin, path, "repetitions", c.repetitions));
    c.seed = static_cast<std::uint64_t>(
        opt_integer(sm, origin, path, "seed", static_cast<long long>(c.seed)));
    c.hop_distance = opt_number(sm, origin, path, "hop_distance", c.hop_distance);
    c.path_spacing = opt_number(sm, origin, path, "path_spacing", c.path_spacing);
    c.source_tx_prob = opt_number(sm, origin, path, "source_tx_prob", c.source_tx_prob);
    c.contention_window = static_cast<int>(
        opt_integer(sm, origin, path, "contention_window", c.contention_window));
    c.link_rate = opt_number(sm, origin, path, "link_rate", c.link_rate);
    c.packet_bytes =
        static_cast<int>(opt_integer(sm, origin, path, "packet_bytes", c.packet_bytes));
    c.ack_bytes =
        static_cast<int>(opt_integer(sm, origin, path, "ack_bytes", c.ack_bytes));
    c.prop_delay = opt_number(sm, origin, path, "prop_delay", c.prop_delay);
    c.flow_rate = opt_number(sm, origin, path, "flow_rate", c.flow_rate);
    c.stop_after = opt_integer(sm, origin, path, "stop_after", c.stop_after);
    c.slot_cap = opt_integer(sm, origin, path, "slot_cap", c.slot_cap);
    c.queue_ref_size = static_cast<int>(
        opt_integer(sm, origin, path, "queue_ref_size", c.queue_ref_size));
    c.decode_needed = static_cast<int>(
        opt_integer(sm, origin, path, "decode_needed", c.decode_needed));
    if (const json* v = opt_key(sm, "forced_error")) {
        if (v->is_number()) {
            c.forced_uniform = v->get<double>();
        } else if (v->is_array()) {
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& item = (*v)[i];
                if (!item.is_number()) {
                    schema_fail(origin, path + ".forced_error[" + std::to_string(i) + "]",
                                "expected a number");
                }
                c.forced_per_path.push_back(item.get<double>());
            }
        } else {
            schema_fail(origin, path + ".forced_error",
                        "expected a number or an array of numbers");
        }
    }
    if (c.repetitions < 1) schema_fail(origin, path + ".repetitions", "must be >= 1");
    if (c.source_tx_prob < 0.0 || c.source_tx_prob > 1.0) {
        schema_fail(origin, path + ".source_tx_prob", "must lie in [0,1]");
    }
    if (c.contention_window < 0) {
        schema_fail(origin, path + ".contention_window", "must be >= 0");
    }
    if (c.link_rate <= 0.0) schema_fail(origin, path + ".link_rate", "must be > 0");
    if (c.packet_bytes < 1) schema_fail(origin, path + ".packet_bytes", "must be >= 1");
    if (c.ack_bytes < 0) schema_fail(origin, path + ".ack_bytes", "must be >= 0");
    if (c.prop_delay < 0.0) schema_fail(origin, path + ".prop_delay", "must be >= 0");
    if (c.flow_rate <= 0.0) schema_fail(origin, path + ".flow_rate", "must be > 0");
    if (c.stop_after < 1) schema_fail(origin, path + ".stop_after", "must be >= 1");
    if (c.slot_cap < 1) schema_fail(origin, path + ".slot_cap", "must be >= 1");
    if (c.queue_ref_size < 1) {
        schema_fail(origin, path + ".queue_ref_size", "must be >= 1");
    }
    if (c.decode_needed < 0) {
        schema_fail(origin, path + ".decode_needed", "must be >= 0");
    }
    if (c.forced_uniform && (*c.forced_uniform < 0.0 || *c.forced_uniform > 1.0)) {
        schema_fail(origin, path + ".forced_error", "must lie in [0,1]");
    }
    for (double e : c.forced_per_path) {
        if (e < 0.0 || e > 1.0) {
            schema_fail(origin, path + ".forced_error", "entries must lie in [0,1]");
        }
    }
}

void validate_for_engine(Scenario& s, const std::string& origin) {
    bool coding = false;
    bool greedy = false;
    for (Scheme sch : s.schemes) {
        coding = coding || is_coding_scheme(sch);
        greedy = greedy || is_greedy_scheme(sch);
    }
    const bool analytic = s.engine != Engine::Simulate;
    if (analytic && greedy) {
        schema_fail(origin, "$.schemes",
                    "greedy network coding exists only in the simulate engine");
    }
    switch (s.engine) {
        case Engine::Markov:
            if (!s.has_error) {
                schema_fail(origin, "$.params", "missing required key 'error'");
            }
            break;
        case Engine::ClosedformHbh:
            if (s.paths != 3 && s.paths != 7) {
                schema_fail(origin, "$.params.paths",
                            "the hop-by-hop model covers 3 or 7 paths");
            }
            if (!s.has_error) {
                schema_fail(origin, "$.params", "missing required key 'error'");
            }
            s.gen_size = s.paths == 3 ? 2 : 3;
            break;
        case Engine::ClosedformHetero:
            if (s.paths != 3) {
                schema_fail(origin, "$.params.paths",
                            "the heterogeneous model covers exactly 3 paths");
            }
            if (s.errors.size() != 3) {
                schema_fail(origin, "$.params.errors", "expected exactly 3 entries");
            }
            s.gen_size = 2;
            break;
        case Engine::ClosedformSinr:
            if (s.paths != 3) {
                schema_fail(origin, "$.params.paths",
                            "the coupled-link model covers exactly 3 paths");
            }
            if (s.gen_size != 2) {
                schema_fail(origin, "$.params.gen_size",
                            "the coupled-link model codes generations of 2");
            }
            if (s.has_geometry) {
                if (!s.has_channel) {
                    schema_fail(origin, "$",
                                "geometry requires a channel block as well");
                }
            } else if (!s.has_error) {
                schema_fail(origin, "$",
                            "needs either params.error or geometry plus channel");
            }
            break;
        case Engine::Simulate:
            if (!s.sim.forced_per_path.empty() &&
                s.sim.forced_per_path.size() != static_cast<std::size_t>(s.paths)) {
                schema_fail(origin, "$.sim.forced_error",
                            "expected one entry per path");
            }
            if (s.has_error && !s.sim.forced_uniform && s.sim.forced_per_path.empty()) {
                s.sim.forced_uniform = s.error;
            }
            break;
    }
    if (s.strict_paths && coding) {
        const int want = (1 << s.gen_size) - 1;
        if (s.paths != want) {
            schema_fail(origin, "$.params",
                        "strict mode requires paths = 2^gen_size - 1 (" +
                            std::to_string(want) + " for gen_size " +
                            std::to_string(s.gen_size) + ", got " +
                            std::to_string(s.paths) + ")");
        }
    }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin,
                             bool force_strict) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw SchemaError(origin + ": " + ex.what());
    }
    if (!j.is_object()) schema_fail(origin, "$", "expected an object");
    check_keys(j, origin, "$",
               {"schema_version", "name", "engine", "schemes", "params", "channel",
                "geometry", "sim"});

    Scenario s;
    const json* ver = opt_key(j, "schema_version");
    if (!ver) schema_fail(origin, "$", "missing required key 'schema_version'");
    if (!ver->is_number_integer() || ver->get<long long>() != 1) {
        schema_fail(origin, "$.schema_version", "unsupported version, expected 1");
    }
    s.name = need_string(j, origin, "$", "name");
    if (s.name.empty()) schema_fail(origin, "$.name", "must not be empty");

    const std::string engine_name = need_string(j, origin, "$", "engine");
    const auto engine = engine_from_string(engine_name);
    if (!engine) {
        schema_fail(origin, "$.engine",
                    "unknown engine '" + engine_name +
                        "'; expected closedform-sinr, closedform-hbh, "
                        "closedform-hetero, markov, or simulate");
    }
    s.engine = *engine;

    const json* schemes = opt_key(j, "schemes");
    if (!schemes) schema_fail(origin, "$", "missing required key 'schemes'");
    if (!schemes->is_array() || schemes->empty()) {
        schema_fail(origin, "$.schemes", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < schemes->size(); ++i) {
        const json& item = (*schemes)[i];
        const std::string where = "$.schemes[" + std::to_string(i) + "]";
        if (!item.is_string()) schema_fail(origin, where, "expected a string");
        const auto sch = scheme_from_string(item.get<std::string>());
        if (!sch) {
            schema_fail(origin, where,
                        "unknown scheme '" + item.get<std::string>() + "'");
        }
        if (std::find(s.schemes.begin(), s.schemes.end(), *sch) != s.schemes.end()) {
            schema_fail(origin, where, "duplicate scheme");
        }
        s.schemes.push_back(*sch);
    }

    const json* params = opt_key(j, "params");
    if (!params) schema_fail(origin, "$", "missing required key 'params'");
    if (!params->is_object()) schema_fail(origin, "$.params", "expected an object");
    parse_params(s, *params, origin);

    if (const json* ch = opt_key(j, "channel")) {
        if (s.engine != Engine::ClosedformSinr && s.engine != Engine::Simulate) {
            schema_fail(origin, "$.channel",
                        "only valid for closedform-sinr and simulate");
        }
        if (!ch->is_object()) schema_fail(origin, "$.channel", "expected an object");
        parse_channel(s, *ch, origin);
    }
    if (const json* geo = opt_key(j, "geometry")) {
        if (s.engine != Engine::ClosedformSinr) {
            schema_fail(origin, "$.geometry", "only valid for closedform-sinr");
        }
        if (!geo->is_object()) schema_fail(origin, "$.geometry", "expected an object");
        parse_geometry(s, *geo, origin);
    }
    if (const json* sm = opt_key(j, "sim")) {
        if (s.engine != Engine::Simulate) {
            schema_fail(origin, "$.sim", "only valid for the simulate engine");
        }
        if (!sm->is_object()) schema_fail(origin, "$.sim", "expected an object");
        parse_sim(s, *sm, origin);
    }

    if (force_strict) s.strict_paths = true;
    validate_for_engine(s, origin);
    s.state_budget = state_budget_from_env(s.state_budget);
    return s;
}

Scenario parse_scenario(const std::string& path, bool force_strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path, force_strict);
}

namespace {

std::string params_summary(const Scenario& s) {
    std::ostringstream o;
    o << "paths=" << s.paths;
    switch (s.engine) {
        case Engine::Markov:
            o << " hops=" << s.hops << " error=" << fmt9(s.error)
              << " gen_size=" << s.gen_size;
            break;
        case Engine::ClosedformHbh:
            o << " hops=" << s.hops << " error=" << fmt9(s.error)
              << " gen_size=" << s.gen_size;
            break;
        case Engine::ClosedformHetero:
            o << " errors=" << fmt9(s.errors[0]) << "/" << fmt9(s.errors[1]) << "/"
              << fmt9(s.errors[2]);
            break;
        case Engine::ClosedformSinr:
            if (s.has_geometry) {
                o << " geometry gamma=" << fmt9(s.channel.gamma)
                  << " eta=" << fmt9(s.channel.eta)
                  << " alpha=" << fmt9(s.channel.alpha);
            } else {
                o << " error=" << fmt9(s.error);
            }
            break;
        case Engine::Simulate:
            o << " hops=" << s.hops << " dh=" << fmt9(s.sim.hop_distance)
              << " dv=" << fmt9(s.sim.path_spacing)
              << " tx_prob=" << fmt9(s.sim.source_tx_prob)
              << " flow=" << fmt9(s.sim.flow_rate) << " stop=" << s.sim.stop_after;
            if (s.sim.forced_uniform) {
                o << " forced_error=" << fmt9(*s.sim.forced_uniform);
            } else if (!s.sim.forced_per_path.empty()) {
                o << " forced_error=per-path";
            } else {
                o << " sinr gamma=" << fmt9(s.channel.gamma);
            }
            break;
    }
    return o.str();
}

void clear_ratios(SchemeResult& r) {
    r.delay_ratio_to_sp = std::numeric_limits<double>::quiet_NaN();
    r.throughput_ratio_to_sp = std::numeric_limits<double>::quiet_NaN();
}

// Builds the table in requested-scheme order from whatever each engine
// produced. Ratios are recomputed over the surviving subset so they always
// reference the SP row actually shown.
ComparisonTable assemble(const Scenario& s,
                         const std::map<Scheme, SchemeResult>& available,
                         const std::map<Scheme, std::string>& failures) {
    ComparisonTable t;
    t.name = s.name;
    t.engine = to_string(s.engine);
    t.params = params_summary(s);

    SchemeResults subset;
    for (Scheme sch : s.schemes) {
        const auto it = available.find(sch);
        if (it != available.end()) subset[sch] = it->second;
    }
    if (subset.count(Scheme::SP)) {
        fill_ratios_to_sp(subset);
    } else {
        for (auto& [sch, res] : subset) clear_ratios(res);
    }

    for (Scheme sch : s.schemes) {
        TableRow row;
        row.scheme = sch;
        const auto fit = failures.find(sch);
        if (fit != failures.end()) {
            row.failed = true;
            row.note = fit->second;
        } else if (const auto it = subset.find(sch); it != subset.end()) {
            row.result = it->second;
        } else {
            row.failed = true;
            row.note = "scheme not modeled by engine " + t.engine;
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Runs fn(0..count-1) across a few worker threads; results must be stored
// by index so completion order cannot matter.
void parallel_for_index(std::size_t count,
                        const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(count, hw > 0 ? hw : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct RepOutcome {
    sim::SimMetrics metrics;
    std::string error;
    bool ok = false;
};

sim::SimConfig build_sim_config(const Scenario& s, Scheme scheme,
                                std::uint64_t seed) {
    sim::SimConfig cfg;
    cfg.topology = sim::build_grid_topology(s.paths, s.hops, s.sim.hop_distance,
                                            s.sim.path_spacing);
    cfg.scheme = scheme;
    cfg.gen_size = s.gen_size;
    cfg.decode_needed = s.sim.decode_needed;
    cfg.source_tx_prob = s.sim.source_tx_prob;
    cfg.contention_window = s.sim.contention_window;
    cfg.link_rate = s.sim.link_rate;
    cfg.packet_bytes = s.sim.packet_bytes;
    cfg.ack_bytes = s.sim.ack_bytes;
    cfg.prop_delay = s.sim.prop_delay;
    cfg.channel = s.channel;
    cfg.flow_rate = s.sim.flow_rate;
    cfg.stop_after = s.sim.stop_after;
    cfg.seed = seed;
    cfg.slot_cap = s.sim.slot_cap;
    cfg.queue_ref_size = s.sim.queue_ref_size;
    if (!s.sim.forced_per_path.empty()) {
        cfg.forced_error = s.sim.forced_per_path;
    } else if (s.sim.forced_uniform) {
        cfg.forced_error.assign(static_cast<std::size_t>(s.paths),
                                *s.sim.forced_uniform);
    }
    return cfg;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                     static_cast<double>(v.size()));
}

ComparisonTable run_simulate(const Scenario& s) {
    const int reps = s.sim.repetitions;
    const std::size_t n_schemes = s.schemes.size();
    std::vector<RepOutcome> outcomes(n_schemes * static_cast<std::size_t>(reps));

    parallel_for_index(outcomes.size(), [&](std::size_t idx) {
        const std::size_t si = idx / static_cast<std::size_t>(reps);
        const int rep = static_cast<int>(idx % static_cast<std::size_t>(reps));
        RepOutcome& out = outcomes[idx];
        try {
            const auto cfg = build_sim_config(s, s.schemes[si],
                                              s.sim.seed + static_cast<std::uint64_t>(rep));
            out.metrics = sim::run(cfg);
            out.ok = true;
        } catch (const sim::SimTimeout& ex) {
            out.error = std::string(ex.what()) + " (" +
                        std::to_string(ex.partial.delivered) + " of " +
                        std::to_string(s.sim.stop_after) + " delivered)";
        } catch (const std::exception& ex) {
            out.error = ex.what();
        }
    });

    std::map<Scheme, SchemeResult> ok;
    std::map<Scheme, std::string> failed;
    std::map<Scheme, std::pair<double, double>> stderrs;
    for (std::size_t si = 0; si < n_schemes; ++si) {
        const Scheme scheme = s.schemes[si];
        std::vector<double> delays, thrs;
        std::string error;
        std::vector<const sim::SimMetrics*> runs;
        for (int rep = 0; rep < reps; ++rep) {
            const RepOutcome& out =
                outcomes[si * static_cast<std::size_t>(reps) + rep];
            if (!out.ok) {
                if (error.empty()) error = out.error;
                continue;
            }
            runs.push_back(&out.metrics);
            delays.push_back(out.metrics.mean_delay_slots);
            thrs.push_back(out.metrics.slots > 0
                               ? static_cast<double>(out.metrics.delivered) /
                                     static_cast<double>(out.metrics.slots)
                               : 0.0);
        }
        if (!error.empty() || runs.empty()) {
            failed[scheme] = error.empty() ? "no successful repetitions" : error;
            continue;
        }

        SchemeResult r;
        r.delay = mean_of(delays);
        r.throughput = mean_of(thrs);
        r.units_per_delivery = is_coding_scheme(scheme) ? s.gen_size : 1.0;
        auto aux_mean = [&](const char* key, auto&& get) {
            std::vector<double> vals;
            vals.reserve(runs.size());
            for (const auto* m : runs) vals.push_back(get(*m));
            r.aux[key] = mean_of(vals);
        };
        aux_mean("mean_delay_s", [](const sim::SimMetrics& m) { return m.mean_delay; });
        aux_mean("throughput_bps",
                 [](const sim::SimMetrics& m) { return m.throughput_bps; });
        aux_mean("pkt_drops", [](const sim::SimMetrics& m) {
            return static_cast<double>(m.pkt_drops);
        });
        aux_mean("snr_drops", [](const sim::SimMetrics& m) {
            return static_cast<double>(m.snr_drops);
        });
        aux_mean("duplicate_deliveries", [](const sim::SimMetrics& m) {
            return static_cast<double>(m.duplicate_deliveries);
        });
        aux_mean("delivered", [](const sim::SimMetrics& m) {
            return static_cast<double>(m.delivered);
        });
        aux_mean("purged", [](const sim::SimMetrics& m) {
            return static_cast<double>(m.purged);
        });
        aux_mean("slots", [](const sim::SimMetrics& m) {
            return static_cast<double>(m.slots);
        });
        aux_mean("src_queue_occupation", [&](const sim::SimMetrics& m) {
            return m.queue_occupation.empty() ? 0.0 : m.queue_occupation[0];
        });
        aux_mean("relay_queue_occupation_max", [](const sim::SimMetrics& m) {
            double peak = 0.0;
            for (std::size_t i = 2; i < m.queue_occupation.size(); ++i) {
                peak = std::max(peak, m.queue_occupation[i]);
            }
            return peak;
        });
        if (is_coding_scheme(scheme)) {
            aux_mean("generations_decoded", [](const sim::SimMetrics& m) {
                return static_cast<double>(m.generations_decoded);
            });
            aux_mean("interarrival_s",
                     [](const sim::SimMetrics& m) { return m.mean_interarrival; });
        }
        ok[scheme] = std::move(r);
        stderrs[scheme] = {stderr_of(delays), stderr_of(thrs)};
    }

    ComparisonTable t = assemble(s, ok, failed);
    for (auto& row : t.rows) {
        const auto it = stderrs.find(row.scheme);
        if (it != stderrs.end()) {
            row.delay_stderr = it->second.first;
            row.throughput_stderr = it->second.second;
        }
    }
    for (int rep = 0; rep < reps; ++rep) {
        t.seeds.push_back(s.sim.seed + static_cast<std::uint64_t>(rep));
    }
    t.notes.push_back("relays accept at most one packet per slot");
    t.notes.push_back(
        "offered load may exceed service rate; compare schemes as trends");
    return t;
}

}  // namespace

ComparisonTable run_scenario(const Scenario& s) {
    switch (s.engine) {
        case Engine::Markov: {
            markov::SchemeParams mp;
            mp.n = s.paths;
            mp.m = s.hops;
            mp.e = s.error;
            mp.k = s.gen_size;
            mp.strict_paths = s.strict_paths;
            mp.state_budget = s.state_budget;
            std::map<Scheme, SchemeResult> ok;
            std::map<Scheme, std::string> failed;
            for (Scheme sch : s.schemes) {
                try {
                    ok[sch] = markov::evaluate_scheme(sch, mp);
                } catch (const std::exception& ex) {
                    failed[sch] = ex.what();
                }
            }
            return assemble(s, ok, failed);
        }
        case Engine::ClosedformHbh: {
            SchemeResults all = s.paths == 3 ? closedform::hop_by_hop_three(s.error)
                                             : closedform::hop_by_hop_seven(s.error);
            if (s.hops > 1) all = closedform::extend_hops(std::move(all), s.hops);
            return assemble(s, all, {});
        }
        case Engine::ClosedformHetero: {
            SchemeResults all = closedform::heterogeneous_three(
                s.errors[0], s.errors[1], s.errors[2]);
            return assemble(s, all, {});
        }
        case Engine::ClosedformSinr: {
            try {
                const auto table =
                    s.has_geometry
                        ? closedform::ConditionalErrorTable::from_channel(
                              s.sources, s.dest, s.channel)
                        : closedform::ConditionalErrorTable::uniform(s.error);
                return assemble(s, closedform::sinr_three_path(table), {});
            } catch (const std::exception& ex) {
                throw EngineError(std::string("closedform-sinr: ") + ex.what());
            }
        }
        case Engine::Simulate:
            return run_simulate(s);
    }
    throw EngineError("unknown engine");
}

RankComparison rank_table(const ComparisonTable& left,
                          const ComparisonTable& right) {
    RankComparison rc;
    rc.left_name = left.name;
    rc.right_name = right.name;

    auto find_row = [](const ComparisonTable& t, Scheme sch) -> const TableRow* {
        for (const auto& row : t.rows) {
            if (row.scheme == sch) return &row;
        }
        return nullptr;
    };
    auto usable = [](const TableRow* row) {
        return row && !row->failed && std::isfinite(row->result.delay) &&
               std::isfinite(row->result.throughput);
    };

    std::vector<Scheme> shared;
    for (const auto& row : left.rows) {
        if (usable(&row) && usable(find_row(right, row.scheme))) {
            shared.push_back(row.scheme);
        }
    }
    if (shared.empty()) return rc;

    std::set<Scheme> tied;
    auto rank_by = [&](const ComparisonTable& t, bool by_delay) {
        std::vector<std::pair<double, Scheme>> keyed;
        for (Scheme sch : shared) {
            const TableRow* row = find_row(t, sch);
            keyed.push_back({by_delay ? row->result.delay : -row->result.throughput,
                             sch});
        }
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return to_string(a.second) < to_string(b.second);
                  });
        std::map<Scheme, int> ranks;
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            ranks[keyed[i].second] = static_cast<int>(i) + 1;
            if (i > 0 && keyed[i].first == keyed[i - 1].first) {
                tied.insert(keyed[i].second);
                tied.insert(keyed[i - 1].second);
            }
        }
        return ranks;
    };

    const auto dl = rank_by(left, true);
    const auto dr = rank_by(right, true);
    const auto tl = rank_by(left, false);
    const auto tr = rank_by(right, false);

    for (Scheme sch : shared) {
        RankEntry e;
        e.scheme = sch;
        e.delay_rank_left = dl.at(sch);
        e.delay_rank_right = dr.at(sch);
        e.throughput_rank_left = tl.at(sch);
        e.throughput_rank_right = tr.at(sch);
        e.tied = tied.count(sch) > 0;
        e.agree = e.delay_rank_left == e.delay_rank_right &&
                  e.throughput_rank_left == e.throughput_rank_right;
        if (!e.agree) ++rc.disagreements;
        rc.entries.push_back(e);
    }
    std::sort(rc.entries.begin(), rc.entries.end(),
              [](const RankEntry& a, const RankEntry& b) {
                  return a.delay_rank_left < b.delay_rank_left;
              });
    return rc;
}

namespace {

long long axis_int(const std::string& axis, double v) {
    const double r = std::floor(v);
    if (r != v || v < -9e18 || v > 9e18) {
        throw SchemaError("sweep: axis '" + axis + "' needs integer values, got " +
                          fmt9(v));
    }
    return static_cast<long long>(r);
}

void apply_axis(Scenario& s, const std::string& axis, double v) {
    const bool simulate = s.engine == Engine::Simulate;
    if (axis == "error") {
        if (s.engine == Engine::ClosedformHetero) {
            throw SchemaError("sweep: heterogeneous scenarios use 'errors', not a "
                              "single error axis");
        }
        if (s.engine == Engine::ClosedformSinr && s.has_geometry) {
            throw SchemaError("sweep: this scenario derives errors from geometry");
        }
        if (v < 0.0 || v > 1.0) {
            throw SchemaError("sweep: error values must lie in [0,1]");
        }
        s.error = v;
        s.has_error = true;
        if (simulate) s.sim.forced_uniform = v;
        return;
    }
    if (axis == "hops") {
        if (s.engine == Engine::ClosedformHetero ||
            s.engine == Engine::ClosedformSinr) {
            throw SchemaError("sweep: axis 'hops' does not apply to " +
                              to_string(s.engine));
        }
        const long long h = axis_int(axis, v);
        if (h < 1) throw SchemaError("sweep: hops must be >= 1");
        s.hops = static_cast<int>(h);
        return;
    }
    if (axis == "paths" || axis == "gen_size") {
        if (s.engine != Engine::Markov && !simulate) {
            throw SchemaError("sweep: axis '" + axis + "' does not apply to " +
                              to_string(s.engine));
        }
        const long long n = axis_int(axis, v);
        if (n < 1) throw SchemaError("sweep: " + axis + " must be >= 1");
        (axis == "paths" ? s.paths : s.gen_size) = static_cast<int>(n);
        return;
    }
    if (!simulate) {
        throw SchemaError("sweep: unknown axis '" + axis + "' for engine " +
                          to_string(s.engine));
    }
    if (axis == "source_tx_prob") {
        if (v < 0.0 || v > 1.0) {
            throw SchemaError("sweep: source_tx_prob must lie in [0,1]");
        }
        s.sim.source_tx_prob = v;
    } else if (axis == "flow_rate") {
        if (v <= 0.0) throw SchemaError("sweep: flow_rate must be > 0");
        s.sim.flow_rate = v;
    } else if (axis == "hop_distance") {
        if (v <= 0.0) throw SchemaError("sweep: hop_distance must be > 0");
        s.sim.hop_distance = v;
    } else if (axis == "path_spacing") {
        if (v < 0.0) throw SchemaError("sweep: path_spacing must be >= 0");
        s.sim.path_spacing = v;
    } else if (axis == "contention_window") {
        const long long cw = axis_int(axis, v);
        if (cw < 0) throw SchemaError("sweep: contention_window must be >= 0");
        s.sim.contention_window = static_cast<int>(cw);
    } else if (axis == "stop_after") {
        const long long n = axis_int(axis, v);
        if (n < 1) throw SchemaError("sweep: stop_after must be >= 1");
        s.sim.stop_after = n;
    } else if (axis == "repetitions") {
        const long long n = axis_int(axis, v);
        if (n < 1) throw SchemaError("sweep: repetitions must be >= 1");
        s.sim.repetitions = static_cast<int>(n);
    } else if (axis == "seed") {
        const long long n = axis_int(axis, v);
        if (n < 0) throw SchemaError("sweep: seed must be >= 0");
        s.sim.seed = static_cast<std::uint64_t>(n);
    } else {
        throw SchemaError("sweep: unknown axis '" + axis + "'");
    }
}

}  // namespace

SweepResult sweep(const Scenario& base, const std::string& axis,
                  const std::vector<double>& values) {
    SweepResult result;
    result.scenario = base.name;
    result.engine = to_string(base.engine);
    result.axis = axis;
    result.values = values;
    for (double v : values) {
        Scenario s = base;
        apply_axis(s, axis, v);
        result.tables.push_back(run_scenario(s));
    }
    return result;
}

namespace {

std::set<std::string> aux_union(const ComparisonTable& t) {
    std::set<std::string> keys;
    for (const auto& row : t.rows) {
        for (const auto& [k, v] : row.result.aux) keys.insert(k);
    }
    return keys;
}

void append_row_csv(std::string& out, const ComparisonTable& t, const TableRow& row,
                    const std::set<std::string>& aux_keys) {
    out += csv_escape(t.name);
    out += ',';
    out += t.engine;
    out += ',';
    out += to_string(row.scheme);
    const auto num = [&](double v) {
        out += ',';
        if (!row.failed) out += fmt9(v);
    };
    num(row.result.delay);
    num(row.result.throughput);
    num(row.result.delay_ratio_to_sp);
    num(row.result.throughput_ratio_to_sp);
    num(row.result.units_per_delivery);
    num(row.delay_stderr);
    num(row.throughput_stderr);
    out += row.failed ? ",1," : ",0,";
    out += csv_escape(row.note);
    for (const auto& key : aux_keys) {
        out += ',';
        const auto it = row.result.aux.find(key);
        if (it != row.result.aux.end()) out += fmt9(it->second);
    }
    out += '\n';
}

}  // namespace

std::string to_csv(const ComparisonTable& t) {
    const auto aux_keys = aux_union(t);
    std::string out =
        "scenario,engine,scheme,delay,throughput,delay_ratio_to_sp,"
        "throughput_ratio_to_sp,units_per_delivery,delay_stderr,"
        "throughput_stderr,failed,note";
    for (const auto& key : aux_keys) {
        out += ',';
        out += csv_escape(key);
    }
    out += '\n';
    for (const auto& row : t.rows) append_row_csv(out, t, row, aux_keys);
    return out;
}

std::string to_csv(const SweepResult& s) {
    std::string out =
        "scenario,engine,scheme,axis,value,delay,throughput,delay_ratio_to_sp,"
        "throughput_ratio_to_sp\n";
    for (std::size_t i = 0; i < s.tables.size(); ++i) {
        for (const auto& row : s.tables[i].rows) {
            out += csv_escape(s.scenario);
            out += ',';
            out += s.engine;
            out += ',';
            out += to_string(row.scheme);
            out += ',';
            out += csv_escape(s.axis);
            out += ',';
            out += fmt9(s.values[i]);
            const auto num = [&](double v) {
                out += ',';
                if (!row.failed) out += fmt9(v);
            };
            num(row.result.delay);
            num(row.result.throughput);
            num(row.result.delay_ratio_to_sp);
            num(row.result.throughput_ratio_to_sp);
            out += '\n';
        }
    }
    return out;
}

std::string to_csv(const RankComparison& r) {
    std::string out =
        "scheme,delay_rank_left,delay_rank_right,throughput_rank_left,"
        "throughput_rank_right,tied,agree\n";
    for (const auto& e : r.entries) {
        out += to_string(e.scheme);
        out += ',' + std::to_string(e.delay_rank_left);
        out += ',' + std::to_string(e.delay_rank_right);
        out += ',' + std::to_string(e.throughput_rank_left);
        out += ',' + std::to_string(e.throughput_rank_right);
        out += e.tied ? ",1" : ",0";
        out += e.agree ? ",1\n" : ",0\n";
    }
    return out;
}

namespace {

json row_to_json(const TableRow& row) {
    json r;
    r["scheme"] = to_string(row.scheme);
    r["delay"] = row.result.delay;
    r["throughput"] = row.result.throughput;
    r["delay_ratio_to_sp"] = row.result.delay_ratio_to_sp;
    r["throughput_ratio_to_sp"] = row.result.throughput_ratio_to_sp;
    r["units_per_delivery"] = row.result.units_per_delivery;
    r["unreachable"] = row.result.unreachable;
    r["delay_stderr"] = row.delay_stderr;
    r["throughput_stderr"] = row.throughput_stderr;
    r["failed"] = row.failed;
    r["note"] = row.note;
    json aux = json::object();
    for (const auto& [k, v] : row.result.aux) aux[k] = v;
    r["aux"] = std::move(aux);
    return r;
}

json table_to_json(const ComparisonTable& t) {
    json out;
    out["schema_version"] = 1;
    out["name"] = t.name;
    out["engine"] = t.engine;
    out["params"] = t.params;
    out["seeds"] = t.seeds;
    out["notes"] = t.notes;
    json rows = json::array();
    for (const auto& row : t.rows) rows.push_back(row_to_json(row));
    out["rows"] = std::move(rows);
    return out;
}

}  // namespace

std::string to_json(const ComparisonTable& t) {
    return table_to_json(t).dump(2) + "\n";
}

std::string to_json(const SweepResult& s) {
    json out;
    out["schema_version"] = 1;
    out["scenario"] = s.scenario;
    out["engine"] = s.engine;
    out["axis"] = s.axis;
    out["values"] = s.values;
    json tables = json::array();
    for (const auto& t : s.tables) tables.push_back(table_to_json(t));
    out["tables"] = std::move(tables);
    return out.dump(2) + "\n";
}

std::string to_json(const RankComparison& r) {
    json out;
    out["schema_version"] = 1;
    out["left"] = r.left_name;
    out["right"] = r.right_name;
    out["disagreements"] = r.disagreements;
    json entries = json::array();
    for (const auto& e : r.entries) {
        json v;
        v["scheme"] = to_string(e.scheme);
        v["delay_rank_left"] = e.delay_rank_left;
        v["delay_rank_right"] = e.delay_rank_right;
        v["throughput_rank_left"] = e.throughput_rank_left;
        v["throughput_rank_right"] = e.throughput_rank_right;
        v["tied"] = e.tied;
        v["agree"] = e.agree;
        entries.push_back(std::move(v));
    }
    out["entries"] = std::move(entries);
    return out.dump(2) + "\n";
}

namespace {

void pad(std::string& line, std::size_t width) {
    while (line.size() < width) line += ' ';
}

std::string grid(const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> widths;
    for (const auto& row : cells) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::string out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) line += "  ";
            std::string cell = row[i];
            pad(cell, i + 1 < row.size() ? widths[i] : 0);
            line += cell;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace

std::string to_text(const ComparisonTable& t) {
    std::string out = t.name + " (" + t.engine + "; " + t.params + ")\n";
    if (!t.seeds.empty()) {
        out += "seeds:";
        for (auto s : t.seeds) out += ' ' + std::to_string(s);
        out += '\n';
    }
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"scheme", "delay", "throughput", "delay/SP", "thr/SP", "note"});
    for (const auto& row : t.rows) {
        if (row.failed) {
            cells.push_back({to_string(row.scheme), "-", "-", "-", "-", row.note});
            continue;
        }
        std::string note = row.note;
        if (!std::isnan(row.delay_stderr)) {
            note = "delay se " + fmt9(row.delay_stderr) +
                   (note.empty() ? "" : "; " + note);
        }
        cells.push_back({to_string(row.scheme), fmt9(row.result.delay),
                         fmt9(row.result.throughput),
                         fmt9(row.result.delay_ratio_to_sp),
                         fmt9(row.result.throughput_ratio_to_sp), note});
    }
    out += grid(cells);
    for (const auto& note : t.notes) out += "note: " + note + "\n";
    return out;
}

std::string to_text(const SweepResult& s) {
    std::string out =
        "sweep " + s.scenario + " over " + s.axis + " (" + s.engine + ")\n";
    for (std::size_t i = 0; i < s.tables.size(); ++i) {
        out += "\n" + s.axis + " = " + fmt9(s.values[i]) + "\n";
        out += to_text(s.tables[i]);
    }
    return out;
}

std::string to_text(const RankComparison& r) {
    std::string out = "rank comparison: " + r.left_name + " vs " + r.right_name +
                      " (" + std::to_string(r.disagreements) + " disagreements)\n";
    std::vector<std::vector<std::string>> cells;
    cells.push_back(
        {"scheme", "delay L/R", "throughput L/R", "tied", "agree"});
    for (const auto& e : r.entries) {
        cells.push_back({to_string(e.scheme),
                         std::to_string(e.delay_rank_left) + "/" +
                             std::to_string(e.delay_rank_right),
                         std::to_string(e.throughput_rank_left) + "/" +
                             std::to_string(e.throughput_rank_right),
                         e.tied ? "yes" : "no", e.agree ? "yes" : "no"});
    }
    out += grid(cells);
    return out;
}

namespace {

struct RefRow {
    Scheme scheme;
    double delay_ratio;
    double thr_ratio;
};

struct RefBlock {
    std::string label;
    double error;
    int paths;
    int hops;  // 0 when the model has no hop parameter
    std::vector<RefRow> rows;
};

constexpr double kRefTolerance = 0.005;

std::vector<RefBlock> table1_blocks() {
    return {
        {"e=0.2 3x2", 0.2, 3, 2,
         {{Scheme::NC, 0.9312, 2.148},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 3.0},
          {Scheme::MC, 0.819, 1.221}}},
        {"e=0.2 3x4", 0.2, 3, 4,
         {{Scheme::NC, 0.967, 2.07},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 3.0},
          {Scheme::MC, 0.845, 1.184}}},
        {"e=0.4 3x2", 0.4, 3, 2,
         {{Scheme::NC, 0.93, 2.15},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 3.0},
          {Scheme::MC, 0.694, 1.44}}},
        {"e=0.4 3x4", 0.4, 3, 4,
         {{Scheme::NC, 0.967, 2.07},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 3.0},
          {Scheme::MC, 0.761, 1.31}}},
        {"e=0.2 7x2", 0.2, 7, 2,
         {{Scheme::NC_L, 0.825, 3.64},
          {Scheme::NC_U, 0.888, 3.38},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 7.0},
          {Scheme::MC, 0.8, 1.25}}},
        {"e=0.4 7x2", 0.4, 7, 2,
         {{Scheme::NC_L, 0.771, 3.89},
          {Scheme::NC_U, 0.903, 3.32},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 7.0},
          {Scheme::MC, 0.613, 1.63}}},
    };
}

std::vector<RefBlock> table2_blocks() {
    return {
        {"e=0.2 3-path", 0.2, 3, 0,
         {{Scheme::NC, 0.8845, 2.261},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 3.0},
          {Scheme::MC, 0.807, 1.24}}},
        {"e=0.4 3-path", 0.4, 3, 0,
         {{Scheme::NC, 0.838, 2.386},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 3.0},
          {Scheme::MC, 0.641, 1.56}}},
        {"e=0.2 7-path", 0.2, 7, 0,
         {{Scheme::NC_L, 0.804, 3.733},
          {Scheme::NC_U, 0.827, 3.629},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 7.0},
          {Scheme::MC, 0.8, 1.25}}},
        {"e=0.4 7-path", 0.4, 7, 0,
         {{Scheme::NC_L, 0.656, 4.573},
          {Scheme::NC_U, 0.777, 3.862},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.0, 7.0},
          {Scheme::MC, 0.601, 1.664}}},
    };
}

struct HeteroBlock {
    std::string label;
    std::array<double, 3> errors;
    std::vector<RefRow> rows;
};

std::vector<HeteroBlock> table3_blocks() {
    return {
        {"e=0.3/0.4/0.5",
         {0.3, 0.4, 0.5},
         {{Scheme::NC, 0.974, 2.053},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.189, 2.523},
          {Scheme::MC, 0.745, 1.343}}},
        {"e=0.5/0.6/0.8",
         {0.5, 0.6, 0.8},
         {{Scheme::NC, 1.056, 1.894},
          {Scheme::SP, 1.0, 1.0},
          {Scheme::MP, 1.583, 1.895},
          {Scheme::MC, 0.658, 1.52}}},
    };
}

Scenario reference_scenario(Engine engine, const std::string& name, int paths,
                            int hops, double error) {
    Scenario s;
    s.engine = engine;
    s.name = name;
    s.paths = paths;
    s.hops = std::max(hops, 1);
    s.gen_size = paths == 7 ? 3 : 2;
    s.error = error;
    s.has_error = true;
    s.state_budget = state_budget_from_env(s.state_budget);
    if (paths == 7) {
        s.schemes = {Scheme::NC_L, Scheme::NC_U, Scheme::SP, Scheme::MP, Scheme::MC};
    } else {
        s.schemes = {Scheme::NC, Scheme::SP, Scheme::MP, Scheme::MC};
    }
    return s;
}

const TableRow* row_of(const ComparisonTable& t, Scheme sch) {
    for (const auto& row : t.rows) {
        if (row.scheme == sch) return &row;
    }
    return nullptr;
}

void check_block(Reproduction& rep, const ComparisonTable& t,
                 const std::string& label, const std::vector<RefRow>& rows) {
    for (const auto& ref : rows) {
        const TableRow* row = row_of(t, ref.scheme);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double d = row && !row->failed ? row->result.delay_ratio_to_sp : nan;
        const double th =
            row && !row->failed ? row->result.throughput_ratio_to_sp : nan;
        const auto add = [&](const char* what, double expected, double actual) {
            ReferenceCheck c;
            c.label = rep.id + " " + label + " " + to_string(ref.scheme) + " " + what;
            c.expected = expected;
            c.actual = actual;
            c.tolerance = kRefTolerance;
            c.pass = std::isfinite(actual) &&
                     std::abs(actual - expected) <= kRefTolerance + 1e-12;
            rep.all_pass = rep.all_pass && c.pass;
            rep.checks.push_back(std::move(c));
        };
        add("delay_ratio", ref.delay_ratio, d);
        add("throughput_ratio", ref.thr_ratio, th);
    }
}

}  // namespace

std::vector<std::string> reproduction_ids() {
    return {"table1", "table2", "table3", "fig4"};
}

Reproduction reproduce(const std::string& id, bool check) {
    Reproduction rep;
    rep.id = id;
    if (id == "table1" || id == "table2") {
        const auto engine =
            id == "table1" ? Engine::Markov : Engine::ClosedformHbh;
        const auto blocks = id == "table1" ? table1_blocks() : table2_blocks();
        for (const auto& block : blocks) {
            Scenario s = reference_scenario(
                engine, id + " " + block.label, block.paths, block.hops, block.error);
            ComparisonTable t = run_scenario(s);
            if (check) check_block(rep, t, block.label, block.rows);
            rep.tables.push_back(std::move(t));
        }
        return rep;
    }
    if (id == "table3") {
        for (const auto& block : table3_blocks()) {
            Scenario s;
            s.engine = Engine::ClosedformHetero;
            s.name = "table3 " + block.label;
            s.paths = 3;
            s.gen_size = 2;
            s.errors = {block.errors[0], block.errors[1], block.errors[2]};
            s.schemes = {Scheme::NC, Scheme::SP, Scheme::MP, Scheme::MC};
            ComparisonTable t = run_scenario(s);
            if (check) check_block(rep, t, block.label, block.rows);
            rep.tables.push_back(std::move(t));
        }
        return rep;
    }
    if (id == "fig4") {
        Scenario base = reference_scenario(Engine::Markov, "fig4", 3, 2, 0.2);
        const std::vector<double> hops = {2, 3, 4, 6};
        SweepResult sw = sweep(base, "hops", hops);
        if (check) {
            const double sp_delay[] = {2.5, 3.75, 5.0, 7.5};
            for (std::size_t i = 0; i < hops.size(); ++i) {
                const TableRow* row = row_of(sw.tables[i], Scheme::SP);
                ReferenceCheck c;
                c.label = "fig4 hops=" + fmt9(hops[i]) + " SP delay";
                c.expected = sp_delay[i];
                c.actual = row && !row->failed
                               ? row->result.delay
                               : std::numeric_limits<double>::quiet_NaN();
                c.tolerance = kRefTolerance;
                c.pass = std::isfinite(c.actual) &&
                         std::abs(c.actual - c.expected) <= kRefTolerance + 1e-12;
                rep.all_pass = rep.all_pass && c.pass;
                rep.checks.push_back(std::move(c));
            }
        }
        rep.sweep = std::move(sw);
        return rep;
    }
    throw SchemaError("unknown reproduction id '" + id +
                      "'; expected table1, table2, table3, or fig4");
}

std::uint64_t state_budget_from_env(std::uint64_t fallback) {
    const char* v = std::getenv("MESHFWD_STATE_BUDGET");
    if (!v || !*v) return fallback;
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v, &end, 10);
    if (errno != 0 || end == v || *end != '\0' || parsed == 0) {
        throw SchemaError(std::string("MESHFWD_STATE_BUDGET: expected a positive "
                                      "integer, got '") +
                          v + "'");
    }
    return parsed;
}

}  // namespace meshfwd::report
