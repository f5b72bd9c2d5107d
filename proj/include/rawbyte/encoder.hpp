#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rawbyte/layout.hpp"
#include "rawbyte/splitter.hpp"

namespace rawbyte {

/// Header-retention policy applied to every packet before concatenation.
enum class HeaderCategory : std::uint8_t {
    AllHeaders,  // whole frame
    OnlyEth,     // link header, then everything from the transport header on
    WithoutEth,  // everything from the network header on
    NoHeaders,   // everything from the transport header on
};

inline constexpr std::array<HeaderCategory, 4> kAllCategories = {
    HeaderCategory::AllHeaders, HeaderCategory::OnlyEth, HeaderCategory::WithoutEth,
    HeaderCategory::NoHeaders};

std::string_view to_string(HeaderCategory cat) noexcept;
std::optional<HeaderCategory> parse_category(std::string_view name) noexcept;

inline constexpr std::size_t kDefaultSampleLen = 1024;

/// Bytes kept under `cat`. When a boundary the category needs is absent the
/// deepest boundary that does exist stands in for it, so e.g. NoHeaders of an
/// ARP frame is everything after the link header.
std::vector<std::uint8_t> slice_category(std::span<const std::uint8_t> pkt,
                                         const HeaderLayout& layout, HeaderCategory cat);

struct SampleMeta {
    std::string scenario;
    UnitKind representation = UnitKind::Packet;
    HeaderCategory category = HeaderCategory::AllHeaders;
    std::string unit_key;

    friend bool operator==(const SampleMeta&, const SampleMeta&) = default;
};

/// One training row. Bytes are kept unscaled; values() applies the 1/255 scaling.
struct ByteSample {
    std::vector<std::uint8_t> bytes;
    std::size_t label = 0;
    SampleMeta meta;

    std::vector<double> values() const;
    void values_into(std::span<double> out) const;

    friend bool operator==(const ByteSample&, const ByteSample&) = default;
};

struct EncodedUnit {
    ByteSample sample;
    std::size_t truncated_bytes = 0;  // bytes dropped past the sample length
};

/// Concatenate per-packet slices in time order, truncate or zero-pad to
/// `sample_len`. Throws EmptyUnit when nothing survives the slicing.
EncodedUnit encode_unit(const TrafficUnit& unit, HeaderCategory cat, std::size_t sample_len);

enum class SplitPart : std::uint8_t { Train, Val, Test };

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

struct Splits {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;

    friend bool operator==(const Splits&, const Splits&) = default;
};

struct Dataset {
    std::vector<ByteSample> samples;
    std::vector<std::string> classes;
    Splits splits;
    std::uint64_t seed = 0;
    std::size_t sample_len = kDefaultSampleLen;
    UnitKind representation = UnitKind::Packet;
    HeaderCategory category = HeaderCategory::AllHeaders;

    std::vector<std::size_t> class_counts() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Per-class sizes of each split by largest remainder: every class's split
/// sizes are within one sample of `count * ratio`.
std::array<std::size_t, 3> allocate_split(std::size_t count, const SplitRatios& ratios);

/// Stratified, seeded split of sample indices. Throws ClassTooSmall when a
/// class cannot give every non-zero-ratio split at least one sample.
Splits stratified_split(std::span<const std::size_t> labels, std::size_t n_classes,
                        const SplitRatios& ratios, std::uint64_t seed,
                        std::span<const std::string> class_names = {});

struct Scenario {
    std::filesystem::path path;
    std::string label;
};

struct BuildOptions {
    std::vector<Scenario> scenarios;
    UnitKind representation = UnitKind::Packet;
    HeaderCategory category = HeaderCategory::AllHeaders;
    std::size_t sample_len = kDefaultSampleLen;
    SplitRatios ratios;
    std::uint64_t seed = 0;
    std::size_t min_classes = 2;
};

struct BuildStats {
    std::size_t packets_total = 0;
    std::size_t packets_unparsable = 0;
    std::size_t packets_no_tuple = 0;
    std::size_t empty_units = 0;
    std::size_t truncated_units = 0;
    std::size_t truncated_bytes = 0;
};

struct BuildResult {
    Dataset dataset;
    BuildStats stats;
};

/// Scenarios sharing a label are merged into one class; class order is the
/// order labels first appear in `scenarios`.
BuildResult build_dataset(const BuildOptions& opts);

/// `label,hexdigits` per sample; `#` lines carry the class vocabulary, split
/// membership and provenance so import_hex restores the same Dataset.
void export_hex(const Dataset& ds, const std::filesystem::path& path,
                std::span<const std::string> header_lines = {});
Dataset import_hex(const std::filesystem::path& path);

/// `key=value` summary: sample length, category, representation, seed,
/// per-class counts, split sizes, build statistics.
void write_dataset_manifest(const std::filesystem::path& path, const Dataset& ds,
                            const BuildStats& stats,
                            std::span<const std::string> header_lines = {});

}  // namespace rawbyte
