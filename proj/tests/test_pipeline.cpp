#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <functional>

#include "rawbyte/bench.hpp"
#include "rawbyte/error.hpp"
#include "rawbyte/pipeline.hpp"
#include "test_util.hpp"

using namespace rawbyte;

namespace {

ErrorKind kind_of(const std::function<void()>& f, std::string* msg = nullptr) {
    try {
        f();
    } catch (const Error& e) {
        if (msg) *msg = e.what();
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

// Small, quick settings shared by the end-to-end cases.
Config small_config(const std::filesystem::path& out) {
    Config c;
    c.set("sample_len", "128");
    c.set("net.kernel", "8");
    c.set("net.stride", "2");
    c.set("net.conv1_filters", "4");
    c.set("net.conv2_filters", "4");
    c.set("train.epochs", "3");
    c.set("train.learning_rate", "0.01");
    c.set("synth.packets", "120");
    c.set("synth.pool", "8");
    c.set("seed", "5");
    c.set("threads", "1");
    c.set("bench.repetitions", "2");
    c.set("output_dir", out.string());
    return c;
}

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
    const auto log = scratch / "cli.log";
    const std::string cmd = std::string(RAWBYTE_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text(log)};
}

}  // namespace

TEST(Config, LayersApplyInOrder) {
    TempDir dir;
    std::ofstream(dir / "a.conf") << "# base\nsample_len = 256\nseed=3\nscenario = benign, caps/b.pcap\n";
    std::ofstream(dir / "b.conf") << "seed=4\n";
    Config c;
    EXPECT_EQ(c.get("sample_len"), "1024");
    c.load_file(dir / "a.conf");
    c.load_file(dir / "b.conf");
    EXPECT_EQ(c.get("sample_len"), "256");
    EXPECT_EQ(c.get("seed"), "4");
    c.set("seed=9");
    EXPECT_EQ(c.get("seed"), "9");
    ASSERT_EQ(c.scenarios().size(), 1u);
    EXPECT_EQ(c.scenarios()[0].label, "benign");
    EXPECT_EQ(c.scenarios()[0].path, dir / "caps/b.pcap");

    EXPECT_EQ(kind_of([&] { c.set("no.such.key=1"); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { c.set("sample_len"); }), ErrorKind::InvalidArgument);
    std::string msg;
    EXPECT_EQ(kind_of([&] { c.load_file(dir / "nope.conf"); }, &msg), ErrorKind::Io);
    EXPECT_NE(msg.find("nope.conf"), std::string::npos);
}

TEST(Config, HashIgnoresPlumbingOnly) {
    Config a, b;
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 8u);
    b.set("threads", "4");
    b.set("output_dir", "/tmp/elsewhere");
    EXPECT_EQ(a.hash(), b.hash());
    b.set("seed", "1");
    EXPECT_NE(a.hash(), b.hash());
    Config c;
    c.add_scenario("x", "/tmp/x.pcap");
    EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, ResolveValidates) {
    Config c;
    c.set("train.epochs", "0");
    EXPECT_EQ(kind_of([&] { resolve(c, false); }), ErrorKind::InvalidArgument);
    Config d;
    d.set("representation", "stream");
    EXPECT_EQ(kind_of([&] { resolve(d, false); }), ErrorKind::InvalidArgument);
    Config e;
    e.add_scenario("x", "/nonexistent/x.pcap");
    std::string msg;
    EXPECT_EQ(kind_of([&] { resolve(e, true); }, &msg), ErrorKind::Io);
    EXPECT_NE(msg.find("/nonexistent/x.pcap"), std::string::npos);
    const auto pc = resolve(Config{}, false);
    EXPECT_EQ(pc.network.conv1_filters, 24u);
    EXPECT_EQ(pc.training.epochs, 50u);
    EXPECT_EQ(pc.training.batch_size, 32u);
    EXPECT_EQ(pc.sample_len, 1024u);
}

TEST(Pipeline, EndToEndWithProvenance) {
    TempDir dir;
    auto cfg = small_config(dir / "out");
    const auto corpus = cmd_synth(resolve(cfg, false), dir / "corpus");
    ASSERT_EQ(corpus.size(), 2u);
    cfg.load_file(dir / "corpus" / "scenarios.conf");
    const auto pc = resolve(cfg);

    const auto splits = cmd_split(pc);
    ASSERT_EQ(splits.size(), 2u);
    EXPECT_EQ(splits[0].packets, 120u);

    const auto enc = cmd_encode(pc);
    EXPECT_EQ(embedded_hash(enc.hex), cfg.hash());
    const auto tr = cmd_train(pc, enc.hex);
    EXPECT_EQ(embedded_hash(tr.model), cfg.hash());
    const auto ev = cmd_eval(pc, tr.model, enc.hex);
    EXPECT_EQ(embedded_hash(ev.metrics), cfg.hash());
    EXPECT_EQ(embedded_hash(ev.report_csv), cfg.hash());
    EXPECT_GE(ev.report.accuracy, 0.0);
    const auto bn = cmd_bench(pc, tr.model, enc.hex);
    EXPECT_EQ(bn.report.repetitions, 2u);
    EXPECT_NO_THROW(cmd_verify(pc, tr.model));

    auto other = cfg;
    other.set("seed", "6");
    EXPECT_EQ(kind_of([&] { cmd_verify(resolve(other), tr.model); }), ErrorKind::VerifyMismatch);

    // same seed, same history file
    const auto first = read_text(tr.history);
    cmd_train(pc, enc.hex);
    EXPECT_EQ(read_text(tr.history), first);

    // a model trained at one sample length cannot score another
    auto longer = cfg;
    longer.set("sample_len", "64");
    longer.set("output_dir", (dir / "out64").string());
    const auto pc64 = resolve(longer);
    const auto enc64 = cmd_encode(pc64);
    EXPECT_EQ(kind_of([&] { cmd_eval(pc64, tr.model, enc64.hex); }), ErrorKind::ShapeMismatch);
}

TEST(Pipeline, BenchRefusesWhileLockHeld) {
    TempDir dir;
    auto cfg = small_config(dir / "out");
    cmd_synth(resolve(cfg, false), dir / "corpus");
    cfg.load_file(dir / "corpus" / "scenarios.conf");
    cfg.set("bench.lock", (dir / "held.lock").string());
    const auto pc = resolve(cfg);
    const auto tr = cmd_train(pc);
    BenchLock holder(dir / "held.lock");
    std::string msg;
    EXPECT_EQ(kind_of([&] { cmd_bench(pc, tr.model); }, &msg), ErrorKind::LockHeld);
    EXPECT_NE(msg.find("held.lock"), std::string::npos);
}

TEST(Cli, ExitCodesAndMessages) {
    TempDir dir;
    auto r = run_cli("train --epochs 0", dir.path());
    EXPECT_EQ(r.code, 2) << r.output;

    r = run_cli("split -s benign,/nonexistent/cap.pcap -o " + (dir / "o").string(), dir.path());
    EXPECT_EQ(r.code, 3) << r.output;
    EXPECT_NE(r.output.find("/nonexistent/cap.pcap"), std::string::npos) << r.output;

    r = run_cli("no-such-command", dir.path());
    EXPECT_EQ(r.code, 2) << r.output;

    r = run_cli("split -s benign," + fixture("benign.pcap").string() + " -r session -o " +
                    (dir / "s").string(),
                dir.path());
    EXPECT_EQ(r.code, 0) << r.output;
    const auto manifest = read_text(dir / "s" / "benign.session.manifest");
    EXPECT_NE(manifest.find("# units=2"), std::string::npos) << manifest;

    r = run_cli("verify " + (dir / "s" / "benign.session.manifest").string() + " --seed 1", dir.path());
    EXPECT_EQ(r.code, 8) << r.output;
}

TEST(Cli, SynthTrainEvalVerify) {
    TempDir dir;
    const std::string common = " --set sample_len=128 --set net.kernel=8 --set net.conv1_filters=4"
                               " --set net.conv2_filters=4 --epochs 2 --seed 3 --threads 1";
    auto r = run_cli("synth --out-dir " + (dir / "c").string() + " --packets 80" + common, dir.path());
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string cfg = " -c " + (dir / "c" / "scenarios.conf").string() + common + " -o " +
                            (dir / "o").string();
    r = run_cli("train" + cfg, dir.path());
    ASSERT_EQ(r.code, 0) << r.output;
    r = run_cli("eval -m " + (dir / "o" / "model.rbm").string() + cfg, dir.path());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(read_text(dir / "o" / "metrics.txt").find("accuracy="), std::string::npos);
    r = run_cli("verify " + (dir / "o" / "metrics.txt").string() + cfg, dir.path());
    EXPECT_EQ(r.code, 0) << r.output;
    r = run_cli("verify " + (dir / "o" / "model.rbm").string() + cfg + " --set seed=4", dir.path());
    EXPECT_EQ(r.code, 8) << r.output;
}
