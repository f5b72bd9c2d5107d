#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rawbyte/bench.hpp"
#include "rawbyte/encoder.hpp"
#include "rawbyte/metrics.hpp"
#include "rawbyte/nn/network.hpp"
#include "rawbyte/nn/train.hpp"
#include "rawbyte/synth.hpp"

namespace rawbyte {

/**
 * Layered key=value settings. Later layers win: built-in defaults, then each
 * config file in order, then command-line overrides. `scenario = label,path`
 * lines accumulate instead of replacing; relative paths resolve against the
 * directory of the file that names them.
 */
class Config {
public:
    Config();

    void load_file(const std::filesystem::path& path);
    /// "key=value". Throws InvalidArgument for unknown keys or bad syntax.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);
    void add_scenario(const std::string& label, const std::filesystem::path& path);
    void clear_scenarios() { scenarios_.clear(); }

    const std::string& get(const std::string& key) const;
    const std::vector<Scenario>& scenarios() const noexcept { return scenarios_; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Sorted `key=value` lines of everything that can change a result.
    /// Thread count, output directory and lock path are left out.
    std::string canonical() const;
    /// CRC-32 of canonical(), as 8 hex digits.
    std::string hash() const;

    static bool is_known_key(const std::string& key);

private:
    std::map<std::string, std::string> values_;
    std::vector<Scenario> scenarios_;
};

struct PipelineConfig {
    std::vector<Scenario> scenarios;
    UnitKind representation = UnitKind::Packet;
    HeaderCategory category = HeaderCategory::AllHeaders;
    std::size_t sample_len = kDefaultSampleLen;
    SplitRatios ratios;
    nn::NetworkConfig network;  // n_classes and input_len are set from the data
    nn::TrainConfig training;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    std::string reference = "auto";  // auto | binary | multiclass | none
    std::size_t bench_repetitions = 5;
    std::filesystem::path bench_lock;
    SynthSpec synth;
    std::string config_hash;

    /// `config_hash=...` and `seed=...`, embedded in every artifact.
    std::vector<std::string> provenance() const;
};

/// Typed view of a Config. Throws InvalidArgument for malformed values and
/// Io for scenario files that do not exist when `check_paths`.
PipelineConfig resolve(const Config& cfg, bool check_paths = true);

BuildOptions build_options(const PipelineConfig& pc);
BuildOptions build_options(const PipelineConfig& pc, UnitKind rep, HeaderCategory cat);
nn::NetworkConfig network_for(const PipelineConfig& pc, const Dataset& ds);
ReferenceSet reference_for(const PipelineConfig& pc, std::size_t n_classes);

struct SplitSummary {
    std::string scenario;
    std::filesystem::path manifest;
    std::size_t packets = 0;
    std::size_t units = 0;
    std::size_t excluded = 0;
};

/// Ingest and split each scenario; one manifest per scenario in output_dir.
std::vector<SplitSummary> cmd_split(const PipelineConfig& pc);

struct EncodeOutput {
    std::filesystem::path hex;
    std::filesystem::path manifest;
    BuildResult build;
};

/// dataset.hex + dataset.manifest in output_dir.
EncodeOutput cmd_encode(const PipelineConfig& pc);

struct TrainOutput {
    std::filesystem::path model;
    std::filesystem::path history;
    nn::TrainHistory train_history;
};

/// Trains on `dataset` (a hex file) or, when empty, on a freshly built
/// dataset. Writes model.rbm and history.csv; a diverged run still writes the
/// partial history before rethrowing.
TrainOutput cmd_train(const PipelineConfig& pc, const std::filesystem::path& dataset = {},
                      const nn::EpochCallback& on_epoch = {});

struct EvalOutput {
    std::filesystem::path metrics;
    std::filesystem::path report_text;
    std::filesystem::path report_csv;
    ConfusionMatrix confusion;
    MetricsReport report;
};

/// Test-split metrics of a saved model. ShapeMismatch when model and dataset
/// disagree on sample length or class vocabulary.
EvalOutput cmd_eval(const PipelineConfig& pc, const std::filesystem::path& model,
                    const std::filesystem::path& dataset = {});

struct BenchOutput {
    std::filesystem::path report_text;
    std::filesystem::path report_csv;
    BenchReport report;
};

/// Timed inference over the test split, holding the bench lock throughout.
BenchOutput cmd_bench(const PipelineConfig& pc, const std::filesystem::path& model,
                      const std::filesystem::path& dataset = {});

struct SweepCellResult {
    UnitKind representation;
    HeaderCategory category;
    std::size_t samples = 0;
    std::size_t epochs_run = 0;
    MetricsReport report;
    std::optional<BenchReport> bench;
};

struct SweepOutput {
    std::filesystem::path report_text;
    std::filesystem::path report_csv;
    std::filesystem::path bench_text;
    std::vector<SweepCellResult> cells;
    std::vector<std::string> warnings;
};

struct SweepOptions {
    unsigned parallel_cells = 0;  // 0 = hardware concurrency
    bool bench = false;           // time the all-headers cells afterwards, serially
    std::vector<UnitKind> representations{kGridRepresentations.begin(), kGridRepresentations.end()};
    std::vector<HeaderCategory> categories{kAllCategories.begin(), kAllCategories.end()};
};

/// Representation x category grid. Every cell is seeded from the config alone,
/// so the report does not depend on scheduling.
SweepOutput cmd_sweep(const PipelineConfig& pc, const SweepOptions& opts = {});

/// Writes the synthetic corpus to `dir` plus `dir/scenarios.conf` listing it.
std::vector<Scenario> cmd_synth(const PipelineConfig& pc, const std::filesystem::path& dir);

/// Hash embedded in an artifact (text `# config_hash=` line or model meta).
std::optional<std::string> embedded_hash(const std::filesystem::path& artifact);

/// Throws VerifyMismatch when the artifact's hash differs from `pc`'s, and
/// InvalidArgument when it carries none.
void cmd_verify(const PipelineConfig& pc, const std::filesystem::path& artifact);

}  // namespace rawbyte
