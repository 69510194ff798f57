// Command-line pipeline: attack-vector synthesis, closed-loop simulation and
// plotting for connected-vehicle platoons under false-data injection.
//
// Exit codes: 0 success / attack found, 2 no attack exists within the bound,
// 3 solver inconclusive, 1 any error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "platoon/config.hpp"
#include "platoon/csv_io.hpp"
#include "platoon/errors.hpp"
#include "platoon/svg_plot.hpp"
#include "platoon/synthesis.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitInconclusive = 3;

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void print_kv(const std::string& key, const std::string& value) {
    std::cout << key << "=" << value << "\n";
}

fs::path ensure_output_dir(const ScenarioConfig& cfg) {
    fs::create_directories(cfg.run.output_dir);
    return cfg.run.output_dir;
}

void write_normalized(const ScenarioConfig& cfg, const fs::path& out_dir) {
    atomic_write_text(out_dir / "normalized.cfg", cfg.normalized_dump());
}

void print_trace_summary(const SimulationTrace& trace) {
    int safety = 0, perf = 0, collision = 0;
    for (const auto& ev : trace.events) {
        switch (ev.kind) {
            case ViolationKind::Safety: ++safety; break;
            case ViolationKind::Performance: ++perf; break;
            case ViolationKind::Collision: ++collision; break;
        }
    }
    print_kv("steps", std::to_string(trace.records.size()));
    print_kv("vehicles", std::to_string(trace.follower_count + 1));
    print_kv("events", std::to_string(trace.events.size()));
    print_kv("safety_events", std::to_string(safety));
    print_kv("performance_events", std::to_string(perf));
    print_kv("collision_events", std::to_string(collision));
    print_kv("min_gap", format_g(trace.min_gap()));
    print_kv("max_gap", format_g(trace.max_gap()));
}

PlotAnnotations annotations_for(const ScenarioConfig& cfg) {
    PlotAnnotations notes;
    notes.attack_window = std::make_pair(cfg.attack.onset, cfg.attack.window_end());
    notes.d_min = cfg.attack.d_min;
    notes.d_max = cfg.attack.d_max;
    return notes;
}

int run_topology(const std::string& kind_name, int n, const std::string& config_path) {
    PlatoonTopology topo;
    if (!config_path.empty()) {
        topo = parse_config(config_path).scenario.topology;
    } else {
        topo = PlatoonTopology::build(topology_kind_from_string(kind_name), n);
    }
    print_kv("kind", to_string(topo.kind()));
    print_kv("n", std::to_string(topo.follower_count()));
    print_kv("matrix", topo.matrix_string());
    return kExitOk;
}

// Returns the exit code together with the vector so `run` can reuse it.
int run_synth(const ScenarioConfig& cfg, const fs::path& attack_path,
              std::optional<AttackVector>* found_vector = nullptr) {
    const SynthesisOutcome outcome = synthesize(cfg.scenario, cfg.attack);
    switch (outcome.status) {
        case SynthesisOutcome::Status::Found:
            write_attack_csv(attack_path, outcome.vector);
            print_kv("feasible", "true");
            print_kv("attack", attack_path.string());
            print_kv("disjunct_vehicle", std::to_string(outcome.disjunct.vehicle));
            print_kv("disjunct_step", std::to_string(outcome.disjunct.k));
            print_kv("theta", format_g(cfg.attack.theta));
            if (found_vector != nullptr) *found_vector = outcome.vector;
            return kExitOk;
        case SynthesisOutcome::Status::NotFound:
            print_kv("feasible", "false");
            return kExitNotFound;
        case SynthesisOutcome::Status::Inconclusive:
            print_kv("feasible", "unknown");
            print_kv("reason", outcome.reason);
            return kExitInconclusive;
    }
    return kExitError;
}

int run_simulate(const ScenarioConfig& cfg, const std::string& attack_csv, const fs::path& trace_path) {
    std::optional<AttackRun> attack;
    if (!attack_csv.empty()) {
        attack = AttackRun{cfg.attack, read_attack_csv(attack_csv, cfg.attack.duration)};
    }
    const SimulationTrace trace =
        simulate(cfg.scenario, cfg.run.horizon, cfg.attack.d_min, cfg.attack.d_max, attack);
    write_trace_csv(trace_path, trace);
    print_kv("trace", trace_path.string());
    print_trace_summary(trace);
    return kExitOk;
}

int run_pipeline(const ScenarioConfig& cfg) {
    const fs::path out_dir = ensure_output_dir(cfg);
    write_normalized(cfg, out_dir);

    std::optional<AttackVector> vector;
    const int synth_code = run_synth(cfg, out_dir / "attack.csv", &vector);
    if (synth_code != kExitOk) return synth_code;

    const SimulationTrace trace = simulate(cfg.scenario, cfg.run.horizon, cfg.attack.d_min,
                                           cfg.attack.d_max, AttackRun{cfg.attack, *vector});
    write_trace_csv(out_dir / "trace.csv", trace);
    print_kv("trace", (out_dir / "trace.csv").string());
    print_trace_summary(trace);

    emit_plots(trace, out_dir, annotations_for(cfg));
    print_kv("plots", out_dir.string());

    const VerificationReport report = verify_attack(cfg.scenario, cfg.attack, *vector);
    print_kv("verified", report.holds ? "true" : "false");
    if (!report.holds) {
        for (const auto& failure : report.failures) std::cerr << "verification: " << failure << "\n";
        return kExitError;
    }
    return kExitOk;
}

int run_plot(const std::string& trace_path, const std::string& config_path,
             const std::string& out_dir_flag) {
    const SimulationTrace trace = read_trace_csv(trace_path);
    PlotAnnotations notes;
    fs::path out_dir = ".";
    if (!config_path.empty()) {
        const ScenarioConfig cfg = parse_config(config_path);
        notes = annotations_for(cfg);
        out_dir = cfg.run.output_dir;
    }
    if (!out_dir_flag.empty()) out_dir = out_dir_flag;
    emit_plots(trace, out_dir, notes);
    print_kv("velocity", (out_dir / "velocity.svg").string());
    print_kv("position", (out_dir / "position.svg").string());
    print_kv("gaps", (out_dir / "gaps.svg").string());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"False-data-injection attack synthesis and simulation for vehicle platoons"};
    app.require_subcommand(1);

    // topology
    auto* topology_cmd = app.add_subcommand("topology", "Print the adjacency matrix of a topology");
    std::string topo_kind = "PF";
    int topo_n = 1;
    std::string topo_config;
    topology_cmd->add_option("--kind", topo_kind, "PF, PLF, TPF or TPLF");
    topology_cmd->add_option("--n", topo_n, "number of followers");
    topology_cmd->add_option("--config", topo_config, "read the topology from a scenario file");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize an attack vector for a scenario");
    std::string synth_config;
    std::string synth_out;
    synth_cmd->add_option("--config", synth_config, "scenario file")->required();
    synth_cmd->add_option("--out", synth_out, "attack CSV path (default: <output_dir>/attack.csv)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a scenario, optionally under attack");
    std::string sim_config;
    std::string sim_attack;
    std::string sim_trace;
    sim_cmd->add_option("--config", sim_config, "scenario file")->required();
    sim_cmd->add_option("--attack", sim_attack, "attack vector CSV to inject");
    sim_cmd->add_option("--trace", sim_trace, "trace CSV path (default: <output_dir>/trace.csv)");

    // run
    auto* run_cmd = app.add_subcommand("run", "synth, simulate, verify and plot in one go");
    std::string run_config;
    run_cmd->add_option("--config", run_config, "scenario file")->required();

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "Render SVG charts from a trace CSV");
    std::string plot_trace;
    std::string plot_config;
    std::string plot_out;
    plot_cmd->add_option("--trace", plot_trace, "trace CSV")->required();
    plot_cmd->add_option("--config", plot_config, "scenario file for window/threshold annotations");
    plot_cmd->add_option("--out-dir", plot_out, "output directory for the SVG files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (topology_cmd->parsed()) {
            if (topo_config.empty() && !topology_cmd->count("--kind")) {
                std::cerr << "error: topology needs --kind/--n or --config\n";
                return kExitError;
            }
            return run_topology(topo_kind, topo_n, topo_config);
        }
        if (synth_cmd->parsed()) {
            const ScenarioConfig cfg = parse_config(synth_config);
            const fs::path out_dir = ensure_output_dir(cfg);
            write_normalized(cfg, out_dir);
            const fs::path attack_path = synth_out.empty() ? out_dir / "attack.csv" : fs::path(synth_out);
            return run_synth(cfg, attack_path);
        }
        if (sim_cmd->parsed()) {
            const ScenarioConfig cfg = parse_config(sim_config);
            const fs::path out_dir = ensure_output_dir(cfg);
            const fs::path trace_path = sim_trace.empty() ? out_dir / "trace.csv" : fs::path(sim_trace);
            return run_simulate(cfg, sim_attack, trace_path);
        }
        if (run_cmd->parsed()) {
            return run_pipeline(parse_config(run_config));
        }
        if (plot_cmd->parsed()) {
            return run_plot(plot_trace, plot_config, plot_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitError;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
