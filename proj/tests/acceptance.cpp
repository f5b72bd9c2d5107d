// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Scratch files go to a temporary directory removed at exit.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "checks.hpp"
#include "rawbyte/encoder.hpp"
#include "rawbyte/error.hpp"
#include "rawbyte/nn/model_io.hpp"
#include "rawbyte/nn/network.hpp"
#include "rawbyte/pcap.hpp"
#include "rawbyte/pipeline.hpp"
#include "test_util.hpp"

using namespace rawbyte;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Runs `body`; a library error is a failure of that criterion, not a crash.
template <class F>
void criterion(const char* name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(false, name, std::string("threw: ") + e.what());
    }
}

void gradients() {
    const auto t0 = Clock::now();
    double worst = 0;
    std::string worst_what;
    int configs = 0;
    for (int c = 0; c < 20; ++c) {
        for (const auto& list : {checks::layer_gradient_errors(c), checks::network_gradient_errors(c)}) {
            for (const auto& e : list) {
                if (e.error >= worst) {
                    worst = e.error;
                    worst_what = e.what;
                }
            }
            ++configs;
        }
    }
    const double secs = since(t0);
    report(worst < 1e-4 && secs < 60.0, "gradient-check",
           fmt("%d configs (layers + composed), worst rel err %.2e at %s (< 1e-4), %.1f s (< 60 s)", configs,
               worst, worst_what.c_str(), secs));
}

void kernel_oracles() {
    const double conv = checks::conv_kernel_worst(1001, 100);
    const double dense = checks::dense_kernel_worst(1002, 100);
    report(conv < 1e-9 && dense < 1e-9, "kernel-oracles",
           fmt("100 cases each, conv1d max |diff| %.2e, dense %.2e (< 1e-9)", conv, dense));
}

void splitter() {
    int matched = 0;
    const int captures = 5;
    for (int s = 0; s < captures; ++s) {
        const auto g = checks::grouping_against_brute_force(2000 + static_cast<std::uint64_t>(s), 1000);
        matched += g.flows_match && g.sessions_match;
    }
    const std::size_t fuzzed = 200;
    const auto broken = checks::conservation_failures(3000, fuzzed);
    report(matched == captures && broken == 0, "splitter-oracle",
           fmt("%d/%d 1000-packet captures equal brute-force flows and sessions; conservation broken on "
               "%zu of %zu fuzzed captures x 3 representations",
               matched, captures, broken, fuzzed));
}

// Header lengths of the checked-in fixture frames, read from the header
// fields by hand: Ethernet 14, IPv4 IHL*4, UDP 8, TCP data offset*4.
std::vector<oracle::Built> fixture_frames() {
    std::vector<oracle::Built> out;
    for (const char* name : {"benign.pcap", "one_udp.pcap"}) {
        for (const auto& p : read_pcap(fixture(name))) {
            oracle::Built b;
            b.bytes = p.data;
            b.eth_len = 14;
            b.net_len = (p.data[14] & 0x0f) * 4u;
            const std::size_t t = b.eth_len + b.net_len;
            b.trans_len = p.data[23] == 6 ? (p.data[t + 12] >> 4) * 4u : 8u;
            out.push_back(b);
        }
    }
    return out;
}

void slices() {
    const auto fx = fixture_frames();
    const auto fx_bad = checks::slice_mismatches(fx);
    const auto rnd = checks::random_frames(4000, 500);
    const auto rnd_bad = checks::slice_mismatches(rnd);
    report(fx_bad == 0 && rnd_bad == 0 && fx.size() == 6, "header-slices",
           fmt("fixture packets %zu/%zu byte-exact, generated frames %zu/%zu; complementarity checked per packet",
               fx.size() - fx_bad, fx.size(), rnd.size() - rnd_bad, rnd.size()));
}

// Synthetic corpus, default network and training, test-split metrics.
struct EndToEnd {
    MetricsReport report;
    std::size_t samples = 0;
    std::size_t epochs = 0;
    double seconds = 0;
};

EndToEnd end_to_end(const std::filesystem::path& dir, std::size_t classes, std::size_t per_class,
                    std::uint64_t seed) {
    const auto t0 = Clock::now();
    Config cfg;
    cfg.set("synth.classes", std::to_string(classes));
    cfg.set("synth.packets", std::to_string(per_class));
    cfg.set("seed", std::to_string(seed));
    cfg.set("output_dir", (dir / "out").string());
    cmd_synth(resolve(cfg, false), dir / "corpus");
    cfg.load_file(dir / "corpus" / "scenarios.conf");
    const auto pc = resolve(cfg);
    const auto tr = cmd_train(pc);
    const auto ev = cmd_eval(pc, tr.model);
    EndToEnd r;
    r.report = ev.report;
    r.samples = ev.confusion.total();
    r.epochs = tr.train_history.epochs.size();
    r.seconds = since(t0);
    return r;
}

void toy_binary(const std::filesystem::path& dir) {
    const auto r = end_to_end(dir, 2, 1000, 1);
    const bool ok = r.report.accuracy >= 0.99 && r.report.weighted_f1 >= 0.99 && r.seconds < 600;
    report(ok, "toy-binary",
           fmt("2000 samples, defaults, %zu epochs run: test accuracy %.4f, f1 %.4f on %zu (>= 0.99), %.1f s (< 600 s)",
               r.epochs, r.report.accuracy, r.report.weighted_f1, r.samples, r.seconds));
}

void toy_multiclass(const std::filesystem::path& dir) {
    const auto r = end_to_end(dir, 5, 1000, 2);
    const bool ok = r.report.accuracy >= 0.95 && r.seconds < 900;
    report(ok, "toy-multiclass",
           fmt("5 classes x 1000, %zu epochs run: test accuracy %.4f, f1 %.4f on %zu (>= 0.95), %.1f s (< 900 s)",
               r.epochs, r.report.accuracy, r.report.weighted_f1, r.samples, r.seconds));
}

void parameter_count() {
    const nn::Network net(nn::NetworkConfig{}, 0);
    const auto n = net.param_count();
    report(n >= 50'000 && n <= 70'000, "parameter-count", fmt("default network %zu trainable (in [50000, 70000])", n));
}

void bench_trend(const std::filesystem::path& dir) {
    Config cfg;
    cfg.set("synth.packets", "1000");
    cfg.set("synth.pool", "64");
    cfg.set("seed", "3");
    cfg.set("bench.repetitions", "5");
    cfg.set("bench.lock", (dir / "bench.lock").string());
    cfg.set("output_dir", (dir / "out").string());
    cmd_synth(resolve(cfg, false), dir / "corpus");
    cfg.load_file(dir / "corpus" / "scenarios.conf");
    SweepOptions opts;
    opts.bench = true;
    opts.categories = {HeaderCategory::AllHeaders};
    const auto out = cmd_sweep(resolve(cfg), opts);
    std::array<double, 3> wall{};
    std::array<std::size_t, 3> units{}, tested{};
    for (const auto& c : out.cells) {
        if (!c.bench) continue;
        const auto i = c.representation == UnitKind::Session ? 0 : c.representation == UnitKind::Flow ? 1 : 2;
        wall[i] = c.bench->wall_test_seconds;
        units[i] = c.samples;
        tested[i] = c.bench->sample_count;
    }
    const bool shape = units[0] < units[1] && units[1] < units[2];
    const bool ok = shape && wall[0] > 0 && wall[0] < wall[1] && wall[1] < wall[2];
    report(ok, "bench-trend",
           fmt("units S/F/P %zu/%zu/%zu, test samples %zu/%zu/%zu, median wall of 5: ExpS %.4f s < ExpF %.4f s < ExpP %.4f s",
               units[0], units[1], units[2], tested[0], tested[1], tested[2], wall[0], wall[1], wall[2]));
}

void determinism(const std::filesystem::path& dir) {
    Config cfg;
    cfg.set("synth.packets", "200");
    cfg.set("train.epochs", "3");
    cfg.set("seed", "4");
    cmd_synth(resolve(cfg, false), dir / "corpus");
    cfg.load_file(dir / "corpus" / "scenarios.conf");
    std::array<std::filesystem::path, 2> outs = {dir / "run1", dir / "run2"};
    std::array<std::vector<std::string>, 2> warnings;
    for (int i = 0; i < 2; ++i) {
        auto c = cfg;
        c.set("output_dir", outs[i].string());
        SweepOptions opts;
        opts.parallel_cells = i == 0 ? 1 : 3;  // different scheduling, same report
        warnings[i] = cmd_sweep(resolve(c), opts).warnings;
    }
    bool same = true;
    std::size_t bytes = 0;
    for (const char* f : {"sweep_report.txt", "sweep_report.csv"}) {
        const auto a = read_bytes(outs[0] / f), b = read_bytes(outs[1] / f);
        same &= !a.empty() && a == b;
        bytes += a.size();
    }
    report(same && warnings[0].empty() && warnings[1].empty(), "determinism",
           fmt("two 12-cell sweeps, seed 4, 1 vs 3 cell workers: reports %s (%zu bytes), %zu/%zu warnings",
               same ? "byte-identical" : "DIFFER", bytes, warnings[0].size(), warnings[1].size()));
}

void round_trips(const std::filesystem::path& dir) {
    std::mt19937_64 rng(5);
    bool pcap_ok = true;
    for (auto order : {ByteOrder::Little, ByteOrder::Big}) {
        for (auto res : {TimeResolution::Micro, TimeResolution::Nano}) {
            std::vector<RawPacket> pkts(200);
            for (auto& p : pkts) {
                p.ts_sec = static_cast<std::uint32_t>(rng());
                p.ts_frac = static_cast<std::uint32_t>(rng() % (res == TimeResolution::Nano ? 1'000'000'000 : 1'000'000));
                p.data.resize(rng() % 1600);
                for (auto& b : p.data) b = static_cast<std::uint8_t>(rng());
                p.orig_len = static_cast<std::uint32_t>(p.data.size() + rng() % 4);
            }
            CaptureInfo info;
            info.byte_order = order;
            info.resolution = res;
            write_pcap(dir / "rt.pcap", pkts, info);
            pcap_ok &= read_pcap(dir / "rt.pcap") == pkts;
        }
    }

    auto spec = default_synth_spec(2, 6);
    spec.packets_per_class = 300;
    BuildOptions o;
    o.scenarios = generate_corpus(spec, dir);
    o.representation = UnitKind::Flow;
    o.seed = 6;
    const auto ds = build_dataset(o).dataset;
    export_hex(ds, dir / "d.hex");
    const bool hex_ok = import_hex(dir / "d.hex") == ds;

    nn::NetworkConfig nc;
    nc.n_classes = 2;
    nn::ModelFile mf{nn::Network(nc, 9), {"a", "b"}, {{"seed", "9"}}};
    nn::save_model(dir / "m.rbm", mf);
    const auto back = nn::load_model(dir / "m.rbm");
    bool model_ok = std::ranges::equal(back.network.params(), mf.network.params());
    for (const auto& s : ds.samples) {
        const auto x = s.values();
        model_ok &= back.network.predict(x) == mf.network.predict(x);  // exact, not approximate
    }
    report(pcap_ok && hex_ok && model_ok, "round-trips",
           fmt("pcap 4 formats x 200 packets %s; hex %zu samples %s; model params and %zu predictions %s",
               pcap_ok ? "lossless" : "DIFFER", ds.samples.size(), hex_ok ? "lossless" : "DIFFER",
               ds.samples.size(), model_ok ? "bit-exact" : "DIFFER"));
}

}  // namespace

int main() {
    TempDir scratch;
    auto sub = [&](const char* name) {
        const auto p = scratch / name;
        std::filesystem::create_directories(p);
        return p;
    };
    criterion("gradient-check", gradients);
    criterion("kernel-oracles", kernel_oracles);
    criterion("splitter-oracle", splitter);
    criterion("header-slices", slices);
    criterion("toy-binary", [&] { toy_binary(sub("binary")); });
    criterion("toy-multiclass", [&] { toy_multiclass(sub("multiclass")); });
    criterion("parameter-count", parameter_count);
    criterion("bench-trend", [&] { bench_trend(sub("bench")); });
    criterion("determinism", [&] { determinism(sub("determinism")); });
    criterion("round-trips", [&] { round_trips(sub("roundtrip")); });
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
