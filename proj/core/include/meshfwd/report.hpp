#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshfwd/channel.hpp"
#include "meshfwd/types.hpp"

namespace meshfwd::report {

// Scenario file violates the schema (bad value, unknown key, missing
// field). Messages carry a JSON-path style location.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An engine failed outright for the whole scenario.
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Engine {
    ClosedformSinr,    // three coupled single-hop links, SINR conditional errors
    ClosedformHbh,     // hop-by-hop re-encoding chains, 3 or 7 paths
    ClosedformHetero,  // three independent links with distinct errors
    Markov,            // absorbing chain on the n x m grid
    Simulate,          // slot-level Monte Carlo
};

std::string to_string(Engine e);
std::optional<Engine> engine_from_string(const std::string& name);

// Monte Carlo settings; topology scalars live here so sweeps can vary them
// and rebuild the grid per run.
struct SimSettings {
    int repetitions = 1;
    std::uint64_t seed = 1;
    double hop_distance = 40.0;
    double path_spacing = 80.0;
    double source_tx_prob = 0.2;
    int contention_window = 7;
    double link_rate = 24e6;
    int packet_bytes = 1500;
    int ack_bytes = 40;
    double prop_delay = 1e-6;
    double flow_rate = 9e6;
    long long stop_after = 2000;
    long long slot_cap = 100'000'000;
    int queue_ref_size = 50;
    int decode_needed = 0;  // 0 picks the per-scheme default
    std::optional<double> forced_uniform;    // same erasure on every path
    std::vector<double> forced_per_path;     // per-path erasures
};

struct Scenario {
    int schema_version = 1;
    std::string name;
    Engine engine = Engine::Markov;
    std::vector<Scheme> schemes;

    int paths = 3;
    int hops = 1;
    int gen_size = 2;
    double error = 0.0;
    bool has_error = false;
    std::vector<double> errors;  // heterogeneous engine, one per path
    bool strict_paths = false;
    std::uint64_t state_budget = 1'000'000;

    channel::ChannelParams channel;
    bool has_channel = false;
    std::array<channel::Position, 3> sources{};  // closedform-sinr geometry
    channel::Position dest{};
    bool has_geometry = false;

    SimSettings sim;
};

// Parses and validates a scenario file. force_strict behaves as if the
// file set "strict_paths": true. Unknown keys anywhere are rejected.
Scenario parse_scenario(const std::string& path, bool force_strict = false);
// Same, from an in-memory document. `origin` names it in diagnostics.
Scenario parse_scenario_text(const std::string& text, const std::string& origin,
                             bool force_strict = false);

struct TableRow {
    Scheme scheme = Scheme::SP;
    SchemeResult result;
    // Sample standard errors over repetitions; NaN for analytic engines
    // and single runs.
    double delay_stderr = std::numeric_limits<double>::quiet_NaN();
    double throughput_stderr = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string note;
};

struct ComparisonTable {
    std::string name;
    std::string engine;
    std::string params;                // short key=value summary
    std::vector<std::uint64_t> seeds;  // simulate only
    std::vector<TableRow> rows;        // requested scheme order
    std::vector<std::string> notes;
};

// Evaluates every requested scheme. Per-scheme failures produce annotated
// rows instead of aborting the table; ratios are filled only when SP is
// among the requested schemes.
ComparisonTable run_scenario(const Scenario& s);

struct RankEntry {
    Scheme scheme = Scheme::SP;
    int delay_rank_left = 0;  // 1 = lowest delay
    int delay_rank_right = 0;
    int throughput_rank_left = 0;  // 1 = highest throughput
    int throughput_rank_right = 0;
    bool tied = false;  // shared a delay or throughput value; broken by name
    bool agree = false;
};

struct RankComparison {
    std::string left_name, right_name;
    std::vector<RankEntry> entries;  // ordered by left delay rank
    int disagreements = 0;
};

// Ranks the schemes present and unfailed in both tables by delay
// (ascending) and throughput (descending). Ties break lexicographically
// by scheme name and are flagged.
RankComparison rank_table(const ComparisonTable& left,
                          const ComparisonTable& right);

struct SweepResult {
    std::string scenario;
    std::string engine;
    std::string axis;
    std::vector<double> values;
    std::vector<ComparisonTable> tables;  // one per value
};

// Re-runs `base` once per value with the named numeric parameter replaced.
// Axes: error, hops, paths, gen_size, and the simulate settings
// (source_tx_prob, flow_rate, hop_distance, path_spacing,
// contention_window, stop_after, repetitions, seed).
SweepResult sweep(const Scenario& base, const std::string& axis,
                  const std::vector<double>& values);

// Emitters. CSV uses a fixed column order, 9 significant digits, and LF
// endings; identical inputs give byte-identical output.
std::string to_csv(const ComparisonTable& t);
std::string to_csv(const SweepResult& s);
std::string to_csv(const RankComparison& r);
std::string to_json(const ComparisonTable& t);
std::string to_json(const SweepResult& s);
std::string to_json(const RankComparison& r);
std::string to_text(const ComparisonTable& t);
std::string to_text(const SweepResult& s);
std::string to_text(const RankComparison& r);

struct ReferenceCheck {
    std::string label;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Reproduction {
    std::string id;
    std::vector<ComparisonTable> tables;
    std::optional<SweepResult> sweep;  // fig4 only
    std::vector<ReferenceCheck> checks;
    bool all_pass = true;
};

// Rebuilds one of the reference artifacts from the bundled scenarios:
// table1 (markov grid ratios), table2 (hop-by-hop ratios), table3
// (heterogeneous links), fig4 (hop-count sweep). When `check` is set the
// result carries per-value comparisons against the reference numbers at
// the stated tolerance.
Reproduction reproduce(const std::string& id, bool check);
std::vector<std::string> reproduction_ids();

// MESHFWD_STATE_BUDGET overrides the Markov state budget when set; an
// unparsable value throws SchemaError.
std::uint64_t state_budget_from_env(std::uint64_t fallback);

}  // namespace meshfwd::report
