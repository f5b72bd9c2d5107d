#include "rawbyte/bench.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rawbyte/error.hpp"
#include "rawbyte/metrics.hpp"

namespace rawbyte {

namespace {

struct CpuTimes {
    double user = 0.0;
    double system = 0.0;
};

CpuTimes cpu_now() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    auto secs = [](const timeval& tv) { return double(tv.tv_sec) + double(tv.tv_usec) * 1e-6; };
    return {secs(ru.ru_utime), secs(ru.ru_stime)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BenchReport bench(const std::function<void()>& pass, std::size_t sample_count,
                  std::size_t repetitions) {
    if (repetitions == 0) throw Error(ErrorKind::InvalidArgument, "repetitions must be at least 1");
    if (sample_count == 0) throw Error(ErrorKind::InvalidArgument, "benchmark needs a non-empty test set");

    BenchReport r;
    r.repetitions = repetitions;
    r.sample_count = sample_count;
    std::vector<double> wall, user, sys;
    for (std::size_t i = 0; i < repetitions; ++i) {
        const CpuTimes c0 = cpu_now();
        const auto t0 = std::chrono::steady_clock::now();
        pass();
        const auto t1 = std::chrono::steady_clock::now();
        const CpuTimes c1 = cpu_now();
        BenchSample s;
        s.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        s.user_seconds = std::max(0.0, c1.user - c0.user);
        s.system_seconds = std::max(0.0, c1.system - c0.system);
        r.runs.push_back(s);
        wall.push_back(s.wall_seconds);
        user.push_back(s.user_seconds);
        sys.push_back(s.system_seconds);
    }
    r.wall_test_seconds = median(wall);
    r.cpu_user_seconds = median(user);
    r.cpu_system_seconds = median(sys);
    r.wall_min_seconds = *std::min_element(wall.begin(), wall.end());
    r.wall_max_seconds = *std::max_element(wall.begin(), wall.end());
    if (r.wall_test_seconds > 0.0) {
        r.utilization = (r.cpu_user_seconds + r.cpu_system_seconds) / r.wall_test_seconds;
        r.samples_per_second = static_cast<double>(sample_count) / r.wall_test_seconds;
    }
    return r;
}

BenchReport bench_inference(const nn::Network& net, const Dataset& ds, std::size_t repetitions,
                            unsigned threads) {
    const auto& idx = ds.splits.test;
    // Scaling is part of the measured pass, as it would be for fresh traffic.
    auto pass = [&] {
        std::vector<std::vector<double>> inputs(idx.size());
        std::vector<std::span<const double>> views(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            inputs[i] = ds.samples[idx[i]].values();
            views[i] = inputs[i];
        }
        const auto scores = net.scores_batch(views, threads);
        volatile std::size_t sink = scores.size();
        (void)sink;
    };
    return bench(pass, idx.size(), repetitions);
}

BenchLock::BenchLock(const std::filesystem::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw Error(ErrorKind::Io, "cannot open lock file " + path.string() + ": " + std::strerror(errno));
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        if (err == EWOULDBLOCK) {
            throw Error(ErrorKind::LockHeld,
                        "another benchmark holds " + path.string() +
                            "; timings taken side by side would not be comparable");
        }
        throw Error(ErrorKind::Io, "cannot lock " + path.string() + ": " + std::strerror(err));
    }
}

BenchLock::~BenchLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

std::filesystem::path default_lock_path() {
    if (const char* p = std::getenv("RAWBYTE_BENCH_LOCK"); p && *p) return p;
    return std::filesystem::temp_directory_path() / "rawbyte-bench.lock";
}

void write_bench_report(std::span<const NamedBench> rows, const std::filesystem::path& text_path,
                        const std::filesystem::path& csv_path, bool with_reference,
                        std::span<const std::string> header_lines) {
    std::ostringstream text, csv;
    for (const auto& h : header_lines) {
        text << "# " << h << '\n';
        csv << "# " << h << '\n';
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %9s %8s %12s %10s %10s %8s %12s %12s\n", "model",
                  "accuracy", "samples", "wall_s", "user_s", "system_s", "cpu_util", "wall_min_s",
                  "wall_max_s");
    text << line;
    csv << "model,accuracy,samples,wall_s,user_s,system_s,cpu_util,samples_per_s,wall_min_s,"
           "wall_max_s,repetitions";
    if (with_reference) csv << ",ref_accuracy,ref_wall_s,ref_system_s,ref_cpu_util";
    csv << '\n';

    for (const auto& r : rows) {
        const auto& b = r.report;
        std::snprintf(line, sizeof line, "%-8s %9.4f %8zu %12.6f %10.6f %10.6f %8.3f %12.6f %12.6f\n",
                      r.name.c_str(), r.accuracy, b.sample_count, b.wall_test_seconds,
                      b.cpu_user_seconds, b.cpu_system_seconds, b.utilization, b.wall_min_seconds,
                      b.wall_max_seconds);
        text << line;
        std::snprintf(line, sizeof line, "%s,%.6f,%zu,%.9f,%.9f,%.9f,%.6f,%.3f,%.9f,%.9f,%zu",
                      r.name.c_str(), r.accuracy, b.sample_count, b.wall_test_seconds,
                      b.cpu_user_seconds, b.cpu_system_seconds, b.utilization, b.samples_per_second,
                      b.wall_min_seconds, b.wall_max_seconds, b.repetitions);
        csv << line;
        if (with_reference) {
            if (const auto ref = reference_cost(r.representation)) {
                std::snprintf(line, sizeof line, ",%.2f,%.3f,%.2f,%.3f", ref->accuracy,
                              ref->elapsed_seconds, ref->system_seconds, ref->cpu_utilization);
                csv << line;
            } else {
                csv << ",-,-,-,-";
            }
        }
        csv << '\n';
    }
    if (with_reference) {
        text << "\nreference (all-headers binary, 2-core device):\n";
        for (UnitKind rep : kGridRepresentations) {
            const auto ref = reference_cost(rep);
            std::snprintf(line, sizeof line, "%-8s %9.2f %8s %12.3f %10s %10.2f %8.3f\n",
                          std::string(experiment_name(rep)).c_str(), ref->accuracy, "-",
                          ref->elapsed_seconds, "-", ref->system_seconds, ref->cpu_utilization);
            text << line;
        }
    }

    auto write = [](const std::filesystem::path& p, const std::string& body) {
        if (p.empty()) return;
        std::ofstream out(p, std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write report: " + p.string());
        out << body;
        if (!out) throw Error(ErrorKind::Io, "write failed: " + p.string());
    };
    write(text_path, text.str());
    write(csv_path, csv.str());
}

}  // namespace rawbyte
