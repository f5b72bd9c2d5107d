#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rawbyte/encoder.hpp"
#include "rawbyte/nn/network.hpp"

namespace rawbyte {

/// One timed pass.
struct BenchSample {
    double wall_seconds = 0.0;
    double user_seconds = 0.0;
    double system_seconds = 0.0;
};

/// Medians over the repetitions, with the wall-time spread.
struct BenchReport {
    double wall_test_seconds = 0.0;
    double cpu_user_seconds = 0.0;
    double cpu_system_seconds = 0.0;
    double utilization = 0.0;  // (user + system) / wall
    std::size_t sample_count = 0;
    double samples_per_second = 0.0;
    std::size_t repetitions = 0;
    double wall_min_seconds = 0.0;
    double wall_max_seconds = 0.0;
    std::vector<BenchSample> runs;
};

/// Times `pass` `repetitions` times. Wall time is from the steady clock, CPU
/// time from getrusage(RUSAGE_SELF). Throws InvalidArgument for zero
/// repetitions or zero samples.
BenchReport bench(const std::function<void()>& pass, std::size_t sample_count,
                  std::size_t repetitions);

/// Eval-mode prediction of every test-split sample of `ds`, timed.
BenchReport bench_inference(const nn::Network& net, const Dataset& ds, std::size_t repetitions,
                            unsigned threads = 0);

/// Exclusive advisory lock held for the object's lifetime. Throws LockHeld
/// when another holder has it.
class BenchLock {
public:
    explicit BenchLock(const std::filesystem::path& path);
    ~BenchLock();
    BenchLock(const BenchLock&) = delete;
    BenchLock& operator=(const BenchLock&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

std::filesystem::path default_lock_path();

struct NamedBench {
    std::string name;  // e.g. "ExpS"
    UnitKind representation = UnitKind::Session;
    double accuracy = 0.0;
    BenchReport report;
};

/// Aligned text table and CSV of bench results, with the
/// reference all-headers binary costs alongside when `with_reference`.
void write_bench_report(std::span<const NamedBench> rows, const std::filesystem::path& text_path,
                        const std::filesystem::path& csv_path, bool with_reference = true,
                        std::span<const std::string> header_lines = {});

}  // namespace rawbyte
