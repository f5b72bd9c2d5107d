#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rawbyte/encoder.hpp"
#include "rawbyte/splitter.hpp"

namespace rawbyte {

/// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::uint64_t> counts;  // row-major n_classes x n_classes

    explicit ConfusionMatrix(std::size_t n = 0) : n_classes(n), counts(n * n, 0) {}

    std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * n_classes + pred]; }
    std::uint64_t at(std::size_t truth, std::size_t pred) const {
        return counts[truth * n_classes + pred];
    }
    std::uint64_t total() const;
    std::uint64_t trace() const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch on unequal lengths, InvalidLabel for ids >= n_classes.
ConfusionMatrix confusion(std::span<const std::size_t> predictions,
                          std::span<const std::size_t> labels, std::size_t n_classes);

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<std::uint64_t> support;
    double weighted_f1 = 0.0;
};

/// Precision is 0 for a class never predicted, recall 0 for a class never
/// present, and f1 0 when precision + recall is 0. Weighted f1 uses the true
/// class counts as weights. Throws EmptyMatrix when total() is 0.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Which reference grid to print next to measured values.
enum class ReferenceSet : std::uint8_t { None, Binary, Multiclass };

struct ReferenceScores {
    double accuracy;
    double f1;
};

std::optional<ReferenceScores> reference_scores(ReferenceSet set, UnitKind rep,
                                                HeaderCategory cat) noexcept;

/// Reference inference-cost figures for the all-headers binary models.
struct ReferenceCost {
    double accuracy;
    double elapsed_seconds;
    double system_seconds;
    double cpu_utilization;
};

std::optional<ReferenceCost> reference_cost(UnitKind rep) noexcept;

struct GridCell {
    UnitKind representation = UnitKind::Session;
    HeaderCategory category = HeaderCategory::AllHeaders;
    MetricsReport report;
};

/// Session, flow, packet order: the row order of the report grid.
inline constexpr std::array<UnitKind, 3> kGridRepresentations = {UnitKind::Session, UnitKind::Flow,
                                                                UnitKind::Packet};

/// Short row label: ExpS / ExpF / ExpP.
std::string_view experiment_name(UnitKind rep) noexcept;

/**
 * Writes an aligned text table to `text_path` and a comma-separated twin to
 * `csv_path` (either may be empty to skip it). One row per grid cell present,
 * in ExpS/ExpF/ExpP x category order; cells are looked up by the last entry
 * for that pair. Returns one "IncompleteGrid: ..." warning per missing cell,
 * or a single warning when `cells` is empty.
 */
std::vector<std::string> emit_report(std::span<const GridCell> cells,
                                     const std::filesystem::path& text_path,
                                     const std::filesystem::path& csv_path,
                                     ReferenceSet reference = ReferenceSet::None,
                                     std::span<const std::string> header_lines = {});

/// key=value dump of one MetricsReport, with class names.
void write_metrics(const std::filesystem::path& path, const MetricsReport& report,
                   const ConfusionMatrix& cm, std::span<const std::string> class_names,
                   std::span<const std::string> header_lines = {});

}  // namespace rawbyte
