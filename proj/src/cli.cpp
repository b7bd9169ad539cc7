#include "ricsim/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ricsim/error.hpp"
#include "ricsim/metrics.hpp"
#include "ricsim/sim_engine.hpp"
#include "ricsim/topology.hpp"
#include "ricsim/traffic.hpp"

namespace ricsim {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"O-RAN energy-saving and traffic-steering simulator", "ricsim"};
    app.require_subcommand(1);

    std::string scenario_path, run_mode, out_dir = ".";
    std::optional<std::uint64_t> run_seed;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario; writes events.jsonl and metrics.json");
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run_cmd->add_option("--mode", run_mode, "Notification mode")->check(CLI::IsMember({"a1", "ccc", "A", "B"}));
    run_cmd->add_option("--seed", run_seed, "Override the scenario seed");
    run_cmd->add_option("--out", out_dir, "Output directory");

    std::string trace_cfg, trace_out;
    auto* trace_cmd = app.add_subcommand("gen-trace", "Generate a diurnal trace CSV");
    trace_cmd->add_option("config", trace_cfg, "Diurnal config JSON (may name a topology)")->required();
    trace_cmd->add_option("--out", trace_out, "Output CSV")->required();
    std::string trace_topology;
    trace_cmd->add_option("--topology", trace_topology, "Topology JSON; defaults to the generated 13/41/5 layout");

    TopologyGenParams gen;
    std::string topo_out;
    auto* topo_cmd = app.add_subcommand("gen-topology", "Generate a synthetic topology JSON");
    topo_cmd->add_option("--sites", gen.sites)->check(CLI::PositiveNumber);
    topo_cmd->add_option("--sectors", gen.sectors)->check(CLI::PositiveNumber);
    topo_cmd->add_option("--bands", gen.bands)->check(CLI::PositiveNumber);
    topo_cmd->add_option("--isd", gen.inter_site_distance_m, "Inter-site distance in metres");
    topo_cmd->add_option("--out", topo_out, "Output JSON")->required();

    std::string log_path, replay_out;
    auto* replay_cmd = app.add_subcommand("replay", "Recompute metrics from an event log");
    replay_cmd->add_option("log", log_path, "events.jsonl")->required();
    replay_cmd->add_option("--out", replay_out, "Write metrics.json here instead of stdout");

    std::string metrics_path;
    bool as_csv = false, as_plot = false;
    auto* report_cmd = app.add_subcommand("report", "Print a metrics report");
    report_cmd->add_option("metrics", metrics_path, "metrics.json")->required();
    auto* csv_flag = report_cmd->add_flag("--csv", as_csv, "metric,value CSV");
    report_cmd->add_flag("--plot-data", as_plot, "Per-sector load/prediction/mode series")->excludes(csv_flag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*run_cmd) {
            Scenario sc = load_scenario(scenario_path);
            if (!run_mode.empty()) sc.set_mode(*notification_mode_from(run_mode));
            if (run_seed) sc.seed = *run_seed;
            const auto result = run(sc);
            const std::filesystem::path dir(out_dir);
            std::filesystem::create_directories(dir);
            result.log.write(dir / "events.jsonl");
            write_file(dir / "metrics.json", metrics_to_json(result.metrics) + "\n");
            write_summary(out, result.metrics);
        } else if (*trace_cmd) {
            const DiurnalConfig cfg = parse_diurnal_config(slurp(trace_cfg));
            const Topology topo = trace_topology.empty() ? generate_topology({}) : load_topology(trace_topology);
            std::ostringstream csv;
            write_trace(csv, synth_diurnal(topo, cfg));
            write_file(trace_out, csv.str());
        } else if (*topo_cmd) {
            write_file(topo_out, topology_to_json(generate_topology(gen)) + "\n");
        } else if (*replay_cmd) {
            const auto metrics = replay(EventLog::read(log_path));
            if (replay_out.empty()) out << metrics_to_json(metrics) << "\n";
            else write_file(replay_out, metrics_to_json(metrics) + "\n");
        } else if (*report_cmd) {
            const auto metrics = metrics_from_json(slurp(metrics_path));
            if (as_csv) write_metrics_csv(out, metrics);
            else if (as_plot) write_plot_data(out, metrics);
            else write_summary(out, metrics);
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace ricsim
