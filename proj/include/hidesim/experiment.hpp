#pragma once

// Experiment configuration and the batch commands behind the CLI.
//
// A config is one JSON document with "schema_version": 1. Parsing produces a
// normalized document with every default filled in; normalizing twice is
// the identity, and its canonical dump is what config hashes cover.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidesim/adversary.hpp"
#include "hidesim/engine.hpp"
#include "hidesim/obfuscation.hpp"
#include "hidesim/privacy.hpp"

namespace hidesim {

inline constexpr int kSchemaVersion = 1;

enum class WrapperKind { None, NaiveOblivious, Bba };

struct WrapperConfig {
    WrapperKind kind = WrapperKind::None;
    std::optional<std::size_t> rounds;          // naive oblivious N; empty = inner length
    std::optional<std::size_t> message_length;  // naive oblivious l; empty = algorithm payload size
    std::uint32_t dummy_slots = 0;              // BBA B
    std::optional<std::size_t> boxes;           // BBA k; empty = inner length
    std::optional<SharedSecret> secret;         // empty = fresh secret per run
    std::vector<BoxSchedule> schedule;          // injected schedule (tests)
};

struct ExperimentConfig {
    nlohmann::json normalized;
    std::string name;
    NetworkGraph graph = NetworkGraph::complete(2);
    std::vector<ChannelModel> channels;
    FeedbackSpec adversary;
    WrapperConfig wrapper;
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::size_t max_rounds = 10000;
    double xi = 2.0;
    std::optional<double> delta_budget;
    double smoothing_alpha = kDefaultSmoothing;
    std::optional<EventMode> event_mode;  // empty = pick automatically

    std::string hash() const;
};

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
};

// Throws ConfigError naming the offending field path, e.g. "wrapper.B".
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {},
                              const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& file, const ConfigOverrides& overrides = {});

// The unwrapped algorithm on `channel`, seeded for one run.
SimulationConfig base_simulation(const ExperimentConfig& cfg, ChannelModel channel, std::uint64_t run_seed);
// The configured (possibly wrapped) algorithm for one run.
SimulationConfig wrapped_simulation(const ExperimentConfig& cfg, ChannelModel channel, std::uint64_t run_seed);

enum class OutputFormat { Csv, Json };

struct RunOutputs {
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> files;
};

RunOutputs cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                   OutputFormat format = OutputFormat::Csv);

struct CompareOptions {
    std::optional<std::size_t> runs;
    std::optional<double> delta_budget;
    std::optional<EventMode> event_mode;
    OutputFormat format = OutputFormat::Json;
};

struct CompareResult {
    PrivacyReport report;
    std::optional<BbaTheory> theory;
    CostOfHiding cost;
    nlohmann::json document;
    std::filesystem::path report_file;
};

CompareResult cmd_compare(const ExperimentConfig& x, const ExperimentConfig& y, const std::filesystem::path& out_dir,
                          const CompareOptions& options = {});

struct ReportResult {
    std::filesystem::path summary;
    std::size_t rows = 0;
    std::vector<std::string> warnings;
};

// Summarizes compare reports (report.json files) into one CSV sweep table.
// Throws ConfigError listing every missing input.
ReportResult cmd_report(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out_file);

}  // namespace hidesim
