// rawbyte: raw-byte traffic classification pipeline.
//
//   rawbyte synth  --out-dir corpus
//   rawbyte sweep  --config corpus/scenarios.conf --out results
//
// Settings come from built-in defaults, then each --config file, then the
// named flags, then --set key=value. Exit codes: 0 ok, 2 usage, 3 input,
// 4 dataset, 5 model, 6 training, 7 bench lock, 8 verify mismatch.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rawbyte/error.hpp"
#include "rawbyte/pipeline.hpp"

namespace {

struct Common {
    std::vector<std::string> configs;
    std::vector<std::string> sets;
    std::vector<std::string> scenarios;
    std::optional<std::string> representation, category, out, optimizer, reference;
    std::optional<std::size_t> sample_len, epochs, batch_size, threads;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.configs, "Config file (key = value lines); repeatable");
    sub->add_option("--set", c.sets, "Override one setting, key=value; repeatable");
    sub->add_option("-s,--scenario", c.scenarios, "Labelled capture, label,path; repeatable");
    sub->add_option("-r,--representation", c.representation, "packet | flow | session");
    sub->add_option("--category", c.category, "all-headers | only-eth | without-eth | no-headers");
    sub->add_option("-L,--sample-len", c.sample_len, "Bytes per sample");
    sub->add_option("--seed", c.seed, "Seed for splits, init, shuffling and dropout");
    sub->add_option("--epochs", c.epochs, "Training epochs (at least 1)");
    sub->add_option("--batch-size", c.batch_size, "Mini-batch size");
    sub->add_option("--optimizer", c.optimizer, "adam | sgd");
    sub->add_option("--threads", c.threads, "Worker threads, 0 = all cores");
    sub->add_option("--reference", c.reference, "auto | binary | multiclass | none");
    sub->add_option("-o,--out", c.out, "Output directory");
}

rawbyte::Config build_config(const Common& c) {
    rawbyte::Config cfg;
    for (const auto& f : c.configs) cfg.load_file(f);
    if (!c.scenarios.empty()) {
        cfg.clear_scenarios();
        for (const auto& s : c.scenarios) cfg.set("scenario", s);
    }
    auto put = [&](const char* key, const auto& v) {
        if (!v) return;
        if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) cfg.set(key, *v);
        else cfg.set(key, std::to_string(*v));
    };
    put("representation", c.representation);
    put("category", c.category);
    put("output_dir", c.out);
    put("train.optimizer", c.optimizer);
    put("reference", c.reference);
    put("sample_len", c.sample_len);
    put("train.epochs", c.epochs);
    put("train.batch_size", c.batch_size);
    put("threads", c.threads);
    put("seed", c.seed);
    for (const auto& s : c.sets) cfg.set(s);
    return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Raw-byte 1D-CNN traffic classifier"};
    app.require_subcommand(1);
    Common common;

    auto* split = app.add_subcommand("split", "Group captures into packet, flow or session units");
    auto* encode = app.add_subcommand("encode", "Build the fixed-length byte dataset (hex export)");
    auto* train = app.add_subcommand("train", "Train the 1D-CNN, checkpointing on validation accuracy");
    auto* eval = app.add_subcommand("eval", "Score a saved model on the test split");
    auto* bench = app.add_subcommand("bench", "Time inference on the test split");
    auto* sweep = app.add_subcommand("sweep", "Train and score every representation x category cell");
    auto* synth = app.add_subcommand("synth", "Write a synthetic labelled corpus");
    auto* verify = app.add_subcommand("verify", "Check an artifact's config hash against a config");
    for (auto* sub : {split, encode, train, eval, bench, sweep, synth, verify}) add_common(sub, common);

    std::string dataset, model, artifact, synth_dir;
    unsigned parallel = 0;
    bool sweep_bench = false;
    std::optional<std::size_t> reps;
    std::optional<std::string> lock;
    std::optional<std::size_t> synth_classes, synth_packets, synth_pool;

    train->add_option("-d,--dataset", dataset, "Hex dataset from `encode`; built from scenarios if absent");
    for (auto* sub : {eval, bench}) {
        sub->add_option("-m,--model", model, "Model file from `train`")->required();
        sub->add_option("-d,--dataset", dataset, "Hex dataset; built from scenarios if absent");
    }
    bench->add_option("--repetitions", reps, "Timed passes; the median is reported");
    bench->add_option("--lock", lock, "Lock file shared by benchmark runs");
    sweep->add_option("--parallel", parallel, "Cells trained at once, 0 = all cores");
    sweep->add_flag("--bench", sweep_bench, "Also time the all-headers cells");
    sweep->add_option("--lock", lock, "Lock file shared by benchmark runs");
    synth->add_option("--out-dir", synth_dir, "Corpus directory")->required();
    synth->add_option("--classes", synth_classes, "Number of classes");
    synth->add_option("--packets", synth_packets, "Packets per class");
    synth->add_option("--pool", synth_pool, "Conversations per class");
    verify->add_option("artifact", artifact, "Manifest, dataset, model or report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        auto cfg = build_config(common);
        if (reps) cfg.set("bench.repetitions", std::to_string(*reps));
        if (lock) cfg.set("bench.lock", *lock);
        if (synth_classes) cfg.set("synth.classes", std::to_string(*synth_classes));
        if (synth_packets) cfg.set("synth.packets", std::to_string(*synth_packets));
        if (synth_pool) cfg.set("synth.pool", std::to_string(*synth_pool));
        const auto pc = rawbyte::resolve(cfg);

        if (*split) {
            for (const auto& s : rawbyte::cmd_split(pc)) {
                std::printf("%s: %zu packets -> %zu units (%zu excluded) -> %s\n", s.scenario.c_str(),
                            s.packets, s.units, s.excluded, s.manifest.c_str());
            }
        } else if (*encode) {
            const auto out = rawbyte::cmd_encode(pc);
            const auto& ds = out.build.dataset;
            std::printf("%zu samples, %zu classes, train/val/test %zu/%zu/%zu -> %s\n",
                        ds.samples.size(), ds.classes.size(), ds.splits.train.size(),
                        ds.splits.val.size(), ds.splits.test.size(), out.hex.c_str());
        } else if (*train) {
            const auto out = rawbyte::cmd_train(pc, dataset, [](const rawbyte::nn::EpochRecord& e) {
                std::fprintf(stderr, "epoch %3zu  loss %.4f  acc %.4f  val_loss %.4f  val_acc %.4f\n",
                             e.epoch, e.train_loss, e.train_acc, e.val_loss, e.val_acc);
            });
            const auto& best = out.train_history.best();
            std::printf("best epoch %zu (val_acc %.4f) -> %s, history %s\n", best.epoch, best.val_acc,
                        out.model.c_str(), out.history.c_str());
        } else if (*eval) {
            const auto out = rawbyte::cmd_eval(pc, model, dataset);
            std::printf("accuracy %.4f  weighted f1 %.4f -> %s\n", out.report.accuracy,
                        out.report.weighted_f1, out.metrics.c_str());
        } else if (*bench) {
            const auto out = rawbyte::cmd_bench(pc, model, dataset);
            const auto& b = out.report;
            std::printf("%zu samples  wall %.6f s (min %.6f, max %.6f)  user %.6f s  system %.6f s  "
                        "util %.3f -> %s\n",
                        b.sample_count, b.wall_test_seconds, b.wall_min_seconds, b.wall_max_seconds,
                        b.cpu_user_seconds, b.cpu_system_seconds, b.utilization,
                        out.report_text.c_str());
        } else if (*sweep) {
            rawbyte::SweepOptions opts;
            opts.parallel_cells = parallel;
            opts.bench = sweep_bench;
            const auto out = rawbyte::cmd_sweep(pc, opts);
            print_warnings(out.warnings);
            std::printf("%zu cells -> %s\n", out.cells.size(), out.report_text.c_str());
        } else if (*synth) {
            const auto scenarios = rawbyte::cmd_synth(pc, synth_dir);
            std::printf("%zu captures -> %s/scenarios.conf\n", scenarios.size(), synth_dir.c_str());
        } else if (*verify) {
            rawbyte::cmd_verify(pc, artifact);
            std::printf("%s: config hash %s matches\n", artifact.c_str(), pc.config_hash.c_str());
        }
    } catch (const rawbyte::Error& e) {
        std::fprintf(stderr, "rawbyte: %s: %s\n", std::string(rawbyte::to_string(e.kind())).c_str(),
                     e.what());
        return rawbyte::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rawbyte: %s\n", e.what());
        return 1;
    }
    return 0;
}
