#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "meshfwd/markov.hpp"
#include "meshfwd/report.hpp"
#include "meshfwd/simulator.hpp"

namespace {

namespace report = meshfwd::report;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEngine = 2;
constexpr int kExitCheckFailed = 3;

struct CommonOpts {
    std::string scenario;
    std::string out;
    std::string format = "table";
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_scenario) {
    if (with_scenario) {
        cmd->add_option("--scenario", o.scenario, "scenario file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
    }
    cmd->add_option("--out", o.out, "write output to this file instead of stdout");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "table"}));
    cmd->add_flag("--strict-paths", o.strict,
                  "require paths = 2^gen_size - 1 for coding schemes");
}

void write_out(const CommonOpts& o, const std::string& payload) {
    if (o.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw report::EngineError(o.out + ": cannot open for writing");
    f << payload;
    if (!f) throw report::EngineError(o.out + ": write failed");
}

template <typename T>
std::string render(const T& value, const std::string& format) {
    if (format == "csv") return report::to_csv(value);
    if (format == "json") return report::to_json(value);
    return report::to_text(value);
}

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string checks_csv(const std::vector<report::ReferenceCheck>& checks) {
    std::string out = "label,expected,actual,tolerance,pass\n";
    for (const auto& c : checks) {
        std::string label = c.label;
        if (label.find(',') != std::string::npos) label = '"' + label + '"';
        out += label + ',' + fmt9(c.expected) + ',' + fmt9(c.actual) + ',' +
               fmt9(c.tolerance) + (c.pass ? ",1\n" : ",0\n");
    }
    return out;
}

std::string checks_text(const std::vector<report::ReferenceCheck>& checks) {
    std::string out;
    for (const auto& c : checks) {
        out += (c.pass ? "PASS " : "FAIL ") + c.label + ": expected " +
               fmt9(c.expected) + ", got " + fmt9(c.actual) + " (tol " +
               fmt9(c.tolerance) + ")\n";
    }
    return out;
}

nlohmann::json checks_json(const std::vector<report::ReferenceCheck>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json v;
        v["label"] = c.label;
        v["expected"] = c.expected;
        v["actual"] = c.actual;
        v["tolerance"] = c.tolerance;
        v["pass"] = c.pass;
        arr.push_back(std::move(v));
    }
    return arr;
}

std::string render_reproduction(const report::Reproduction& rep,
                                const std::string& format, bool check) {
    if (format == "json") {
        nlohmann::json out;
        out["schema_version"] = 1;
        out["id"] = rep.id;
        nlohmann::json tables = nlohmann::json::array();
        for (const auto& t : rep.tables) {
            tables.push_back(nlohmann::json::parse(report::to_json(t)));
        }
        out["tables"] = std::move(tables);
        if (rep.sweep) {
            out["sweep"] = nlohmann::json::parse(report::to_json(*rep.sweep));
        }
        if (check) {
            out["checks"] = checks_json(rep.checks);
            out["all_pass"] = rep.all_pass;
        }
        return out.dump(2) + "\n";
    }
    std::string out;
    if (format == "csv") {
        for (const auto& t : rep.tables) {
            if (!out.empty()) out += '\n';
            out += report::to_csv(t);
        }
        if (rep.sweep) {
            if (!out.empty()) out += '\n';
            out += report::to_csv(*rep.sweep);
        }
        if (check) {
            out += '\n';
            out += checks_csv(rep.checks);
        }
        return out;
    }
    for (const auto& t : rep.tables) {
        if (!out.empty()) out += '\n';
        out += report::to_text(t);
    }
    if (rep.sweep) {
        if (!out.empty()) out += '\n';
        out += report::to_text(*rep.sweep);
    }
    if (check) {
        out += '\n';
        out += checks_text(rep.checks);
        out += rep.all_pass ? "all reference checks passed\n"
                            : "reference checks FAILED\n";
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay and throughput of multipath forwarding schemes"};
    app.require_subcommand(1);

    CommonOpts analytic_opts;
    auto* analytic = app.add_subcommand(
        "analytic", "evaluate a scenario with an analytical engine");
    add_common(analytic, analytic_opts, true);

    CommonOpts sim_opts;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> reps_override;
    auto* simulate =
        app.add_subcommand("simulate", "run the slot-level Monte Carlo engine");
    add_common(simulate, sim_opts, true);
    simulate->add_option("--seed", seed_override, "base seed (overrides the file)");
    simulate->add_option("--reps", reps_override,
                         "repetitions (overrides the file)");

    CommonOpts cmp_opts;
    std::string cmp_left, cmp_right;
    auto* compare = app.add_subcommand(
        "compare", "rank schemes under two scenarios and report agreement");
    compare->add_option("left", cmp_left, "first scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("right", cmp_right, "second scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(compare, cmp_opts, false);

    CommonOpts sweep_opts;
    std::string sweep_axis;
    std::vector<double> sweep_values;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "re-run a scenario while varying one numeric parameter");
    add_common(sweep_cmd, sweep_opts, true);
    sweep_cmd->add_option("--axis", sweep_axis, "parameter to vary")->required();
    sweep_cmd
        ->add_option("--values", sweep_values, "values to sweep over")
        ->required()
        ->delimiter(',');

    CommonOpts rep_opts;
    std::string rep_id;
    bool rep_check = false;
    auto* reproduce_cmd = app.add_subcommand(
        "reproduce", "rebuild a bundled reference table or figure");
    reproduce_cmd
        ->add_option("id", rep_id, "table1, table2, table3, fig4, or all")
        ->required();
    reproduce_cmd->add_flag("--check", rep_check,
                            "compare against the reference numbers");
    add_common(reproduce_cmd, rep_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analytic->parsed()) {
            const auto s =
                report::parse_scenario(analytic_opts.scenario, analytic_opts.strict);
            if (s.engine == report::Engine::Simulate) {
                throw report::SchemaError(analytic_opts.scenario +
                                          ": uses the simulate engine; run the "
                                          "'simulate' command instead");
            }
            write_out(analytic_opts, render(report::run_scenario(s),
                                            analytic_opts.format));
            return kExitOk;
        }
        if (simulate->parsed()) {
            auto s = report::parse_scenario(sim_opts.scenario, sim_opts.strict);
            if (s.engine != report::Engine::Simulate) {
                throw report::SchemaError(sim_opts.scenario +
                                          ": uses an analytical engine; run the "
                                          "'analytic' command instead");
            }
            if (seed_override) s.sim.seed = *seed_override;
            if (reps_override) {
                if (*reps_override < 1) {
                    throw report::SchemaError("--reps: must be >= 1");
                }
                s.sim.repetitions = *reps_override;
            }
            write_out(sim_opts, render(report::run_scenario(s), sim_opts.format));
            return kExitOk;
        }
        if (compare->parsed()) {
            const auto left = report::parse_scenario(cmp_left, cmp_opts.strict);
            const auto right = report::parse_scenario(cmp_right, cmp_opts.strict);
            const auto tl = report::run_scenario(left);
            const auto tr = report::run_scenario(right);
            const auto ranks = report::rank_table(tl, tr);
            std::string payload;
            if (cmp_opts.format == "table") {
                payload = report::to_text(tl) + "\n" + report::to_text(tr) + "\n" +
                          report::to_text(ranks);
            } else {
                payload = render(ranks, cmp_opts.format);
            }
            write_out(cmp_opts, payload);
            return kExitOk;
        }
        if (sweep_cmd->parsed()) {
            const auto s =
                report::parse_scenario(sweep_opts.scenario, sweep_opts.strict);
            const auto result = report::sweep(s, sweep_axis, sweep_values);
            write_out(sweep_opts, render(result, sweep_opts.format));
            return kExitOk;
        }
        if (reproduce_cmd->parsed()) {
            std::vector<std::string> ids;
            if (rep_id == "all") {
                ids = report::reproduction_ids();
            } else {
                ids.push_back(rep_id);
            }
            std::string payload;
            bool all_pass = true;
            for (const auto& id : ids) {
                const auto rep = report::reproduce(id, rep_check);
                all_pass = all_pass && rep.all_pass;
                if (!payload.empty()) payload += '\n';
                payload += render_reproduction(rep, rep_opts.format, rep_check);
            }
            write_out(rep_opts, payload);
            if (rep_check && !all_pass) return kExitCheckFailed;
            return kExitOk;
        }
    } catch (const report::SchemaError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitEngine;
    }
    return kExitUsage;
}
