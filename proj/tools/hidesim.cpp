#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hidesim/experiment.hpp"
#include "hidesim/topology.hpp"

using namespace hidesim;
namespace fs = std::filesystem;

namespace {

constexpr int kConfigExit = 2;
constexpr int kSimulationExit = 3;

OutputFormat format_of(const std::string& s) { return s == "json" ? OutputFormat::Json : OutputFormat::Csv; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hidesim: simulate hiding in multi-hop radio networks"};
    app.require_subcommand(1);

    std::string config, against, out_dir = "out", format = "csv", event_mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<double> delta;
    std::vector<std::string> inputs;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "override the master seed");
        cmd->add_option("--runs", runs, "override the number of runs");
    };

    auto* run_cmd = app.add_subcommand("run", "run simulations, write traces and feedback streams");
    add_common(run_cmd);
    run_cmd->add_option("--out-dir", out_dir, "output directory");
    run_cmd->add_option("--format", format, "feedback file format")->check(CLI::IsMember({"csv", "json"}));

    auto* cmp_cmd = app.add_subcommand("compare", "estimate (eps, delta) between two scenarios");
    add_common(cmp_cmd);
    cmp_cmd->add_option("--against", against, "second scenario config")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--out-dir", out_dir, "output directory");
    cmp_cmd->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
    cmp_cmd->add_option("--delta", delta, "delta budget");
    cmp_cmd->add_option("--event-mode", event_mode, "stream or box_counts")
        ->check(CLI::IsMember({"stream", "box_counts"}));

    std::string summary = "summary.csv";
    auto* rep_cmd = app.add_subcommand("report", "summarize compare reports into a sweep table");
    rep_cmd->add_option("inputs", inputs, "report.json files");
    rep_cmd->add_option("--out", summary, "summary CSV path");

    auto* val_cmd = app.add_subcommand("validate", "check a config and print its normalized form");
    add_common(val_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigExit;
    }

    try {
        ConfigOverrides ov{seed, runs};
        if (runs && *runs == 0) throw ConfigError("runs: must be >= 1");
        if (*run_cmd) {
            auto cfg = load_config(config, ov);
            auto out = cmd_run(cfg, out_dir, format_of(format));
            std::cout << out.manifest.string() << '\n';
        } else if (*cmp_cmd) {
            auto x = load_config(config, ov);
            auto y = load_config(against, ov);
            CompareOptions opt;
            opt.runs = runs;
            opt.delta_budget = delta;
            if (!event_mode.empty()) opt.event_mode = parse_event_mode(event_mode);
            opt.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
            auto res = cmd_compare(x, y, out_dir, opt);
            std::cout << res.document.dump(2) << '\n';
        } else if (*rep_cmd) {
            std::vector<fs::path> paths(inputs.begin(), inputs.end());
            auto res = cmd_report(paths, summary);
            for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << res.summary.string() << " (" << res.rows << " rows)\n";
        } else if (*val_cmd) {
            auto cfg = load_config(config, ov);
            std::cout << "config_hash " << cfg.hash() << '\n' << cfg.normalized.dump(2) << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const TopologyError& e) {
        std::cerr << "topology error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kSimulationExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
