#include "rawbyte/pipeline.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rawbyte/error.hpp"
#include "rawbyte/layout.hpp"
#include "rawbyte/nn/model_io.hpp"
#include "rawbyte/splitter.hpp"

namespace rawbyte {

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"representation", "packet"},
        {"category", "all-headers"},
        {"sample_len", "1024"},
        {"split.train", "0.8"},
        {"split.val", "0.1"},
        {"split.test", "0.1"},
        {"seed", "0"},
        {"train.epochs", "50"},
        {"train.batch_size", "32"},
        {"train.learning_rate", "0.001"},
        {"train.optimizer", "adam"},
        {"train.stop_at_perfect", "true"},
        {"net.conv1_filters", "24"},
        {"net.conv2_filters", "32"},
        {"net.kernel", "64"},
        {"net.stride", "3"},
        {"net.pool", "5"},
        {"net.dropout", "0.5"},
        {"net.head", "softmax"},
        {"net.padding", "same"},
        {"threads", "0"},
        {"output_dir", "out"},
        {"reference", "auto"},
        {"bench.repetitions", "5"},
        {"bench.lock", ""},
        {"synth.classes", "2"},
        {"synth.packets", "1000"},
        {"synth.payload_min", "32"},
        {"synth.payload_max", "256"},
        {"synth.pool", "16"},
        {"synth.reply", "0.5"},
        {"synth.transport", "mixed"},
        {"synth.signature_offset", "0"},
        {"synth.signature_len", "8"},
    };
    return d;
}

bool unhashed(const std::string& key) {
    return key == "threads" || key == "output_dir" || key == "bench.lock";
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end || v.empty()) {
        throw Error(ErrorKind::InvalidArgument, key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end || v.empty()) {
        throw Error(ErrorKind::InvalidArgument, key + ": expected a number, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::InvalidArgument, key + ": expected true or false, got '" + v + "'");
}

std::string fmt_hash(std::uint32_t h) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", h);
    return buf;
}

Dataset load_or_build(const PipelineConfig& pc, const std::filesystem::path& dataset) {
    if (!dataset.empty()) {
        Dataset ds = import_hex(dataset);
        return ds;
    }
    return build_dataset(build_options(pc)).dataset;
}

void check_model_matches(const nn::ModelFile& m, const Dataset& ds) {
    const auto& c = m.network.config();
    if (c.input_len != ds.sample_len) {
        throw Error(ErrorKind::ShapeMismatch, "model expects " + std::to_string(c.input_len) +
                                                  "-byte samples, dataset has " +
                                                  std::to_string(ds.sample_len));
    }
    if (!m.classes.empty() && m.classes != ds.classes) {
        std::string a, b;
        for (const auto& s : m.classes) a += (a.empty() ? "" : ",") + s;
        for (const auto& s : ds.classes) b += (b.empty() ? "" : ",") + s;
        throw Error(ErrorKind::ShapeMismatch, "model classes {" + a + "} differ from dataset classes {" + b + "}");
    }
    if (c.n_classes != ds.classes.size()) {
        throw Error(ErrorKind::ShapeMismatch, "model has " + std::to_string(c.n_classes) +
                                                  " outputs, dataset has " +
                                                  std::to_string(ds.classes.size()) + " classes");
    }
}

}  // namespace

Config::Config() : values_(defaults()) {}

bool Config::is_known_key(const std::string& key) {
    return key == "scenario" || defaults().count(key) > 0;
}

void Config::set(const std::string& key, const std::string& value) {
    if (key == "scenario") {
        const auto comma = value.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorKind::InvalidArgument, "scenario: expected 'label,path', got '" + value + "'");
        }
        add_scenario(trim(value.substr(0, comma)), trim(value.substr(comma + 1)));
        return;
    }
    if (!is_known_key(key)) throw Error(ErrorKind::InvalidArgument, "unknown setting '" + key + "'");
    values_[key] = value;
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw Error(ErrorKind::InvalidArgument, "expected key=value, got '" + assignment + "'");
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::add_scenario(const std::string& label, const std::filesystem::path& path) {
    if (label.empty() || path.empty()) {
        throw Error(ErrorKind::InvalidArgument, "scenario needs both a label and a path");
    }
    scenarios_.push_back({path, label});
}

void Config::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config: " + path.string());
    const auto base = path.parent_path();
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::InvalidArgument,
                        path.string() + ":" + std::to_string(no) + ": expected key = value");
        }
        const auto key = trim(t.substr(0, eq));
        const auto value = trim(t.substr(eq + 1));
        try {
            if (key == "scenario") {
                const auto comma = value.find(',');
                if (comma == std::string::npos) {
                    throw Error(ErrorKind::InvalidArgument, "scenario: expected 'label,path'");
                }
                std::filesystem::path p = trim(value.substr(comma + 1));
                if (p.is_relative()) p = base / p;
                add_scenario(trim(value.substr(0, comma)), p.lexically_normal());
            } else {
                set(key, value);
            }
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ":" + std::to_string(no) + ": " + e.what());
        }
    }
}

const std::string& Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::InvalidArgument, "unknown setting '" + key + "'");
    return it->second;
}

std::string Config::canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) {
        if (!unhashed(k)) os << k << '=' << v << '\n';
    }
    for (const auto& s : scenarios_) os << "scenario=" << s.label << ',' << s.path.string() << '\n';
    return os.str();
}

std::string Config::hash() const {
    const auto c = canonical();
    const auto h = crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(c.data()),
                         static_cast<uInt>(c.size()));
    return fmt_hash(static_cast<std::uint32_t>(h));
}

std::vector<std::string> PipelineConfig::provenance() const {
    return {"config_hash=" + config_hash, "seed=" + std::to_string(seed)};
}

PipelineConfig resolve(const Config& cfg, bool check_paths) {
    PipelineConfig pc;
    auto u = [&](const char* k) { return to_u64(k, cfg.get(k)); };
    auto d = [&](const char* k) { return to_double(k, cfg.get(k)); };

    pc.scenarios = cfg.scenarios();
    if (check_paths) {
        for (const auto& s : pc.scenarios) {
            if (!std::filesystem::exists(s.path)) {
                throw Error(ErrorKind::Io, "scenario " + s.label + ": no such file: " + s.path.string());
            }
        }
    }
    const auto rep = parse_unit_kind(cfg.get("representation"));
    if (!rep) throw Error(ErrorKind::InvalidArgument, "representation: expected packet, flow or session");
    pc.representation = *rep;
    const auto cat = parse_category(cfg.get("category"));
    if (!cat) {
        throw Error(ErrorKind::InvalidArgument,
                    "category: expected all-headers, only-eth, without-eth or no-headers");
    }
    pc.category = *cat;
    pc.sample_len = u("sample_len");
    if (pc.sample_len == 0) throw Error(ErrorKind::InvalidArgument, "sample_len must be at least 1");
    pc.ratios = {d("split.train"), d("split.val"), d("split.test")};
    pc.seed = u("seed");

    auto& t = pc.training;
    t.epochs = u("train.epochs");
    if (t.epochs == 0) throw Error(ErrorKind::InvalidArgument, "epochs must be at least 1");
    t.batch_size = u("train.batch_size");
    if (t.batch_size == 0) throw Error(ErrorKind::InvalidArgument, "batch size must be at least 1");
    t.learning_rate = d("train.learning_rate");
    if (!(t.learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    const auto opt = nn::parse_optimizer(cfg.get("train.optimizer"));
    if (!opt) throw Error(ErrorKind::InvalidArgument, "train.optimizer: expected adam or sgd");
    t.optimizer = *opt;
    t.stop_at_perfect = to_bool("train.stop_at_perfect", cfg.get("train.stop_at_perfect"));
    t.seed = pc.seed;
    t.threads = static_cast<unsigned>(u("threads"));

    auto& n = pc.network;
    n.conv1_filters = u("net.conv1_filters");
    n.conv2_filters = u("net.conv2_filters");
    n.kernel = u("net.kernel");
    n.stride = u("net.stride");
    n.pool = u("net.pool");
    n.dropout_rate = d("net.dropout");
    if (!(n.dropout_rate >= 0.0 && n.dropout_rate < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "net.dropout must be in [0, 1)");
    }
    const auto& head = cfg.get("net.head");
    if (head == "softmax") n.head = nn::Head::Softmax;
    else if (head == "sigmoid") n.head = nn::Head::Sigmoid;
    else throw Error(ErrorKind::InvalidArgument, "net.head: expected softmax or sigmoid");
    const auto& pad = cfg.get("net.padding");
    if (pad == "same") n.padding = nn::Padding::Same;
    else if (pad == "valid") n.padding = nn::Padding::Valid;
    else throw Error(ErrorKind::InvalidArgument, "net.padding: expected same or valid");
    n.input_len = pc.sample_len;

    pc.output_dir = cfg.get("output_dir");
    pc.reference = cfg.get("reference");
    if (pc.reference != "auto" && pc.reference != "binary" && pc.reference != "multiclass" &&
        pc.reference != "none") {
        throw Error(ErrorKind::InvalidArgument, "reference: expected auto, binary, multiclass or none");
    }
    pc.bench_repetitions = u("bench.repetitions");
    if (pc.bench_repetitions == 0) throw Error(ErrorKind::InvalidArgument, "bench.repetitions must be at least 1");
    pc.bench_lock = cfg.get("bench.lock");
    if (pc.bench_lock.empty()) pc.bench_lock = default_lock_path();

    pc.synth = default_synth_spec(u("synth.classes"), pc.seed, u("synth.signature_len"));
    const auto sig_off = u("synth.signature_offset");
    for (auto& c : pc.synth.classes) c.signature.payload_offset = sig_off;
    pc.synth.packets_per_class = u("synth.packets");
    pc.synth.payload_min = u("synth.payload_min");
    pc.synth.payload_max = u("synth.payload_max");
    pc.synth.tuple_pool = u("synth.pool");
    pc.synth.reply_fraction = d("synth.reply");
    const auto& tr = cfg.get("synth.transport");
    if (tr == "udp") pc.synth.transport = SynthTransport::Udp;
    else if (tr == "tcp") pc.synth.transport = SynthTransport::Tcp;
    else if (tr == "mixed") pc.synth.transport = SynthTransport::Mixed;
    else throw Error(ErrorKind::InvalidArgument, "synth.transport: expected udp, tcp or mixed");

    pc.config_hash = cfg.hash();
    return pc;
}

BuildOptions build_options(const PipelineConfig& pc, UnitKind rep, HeaderCategory cat) {
    BuildOptions o;
    o.scenarios = pc.scenarios;
    o.representation = rep;
    o.category = cat;
    o.sample_len = pc.sample_len;
    o.ratios = pc.ratios;
    o.seed = pc.seed;
    return o;
}

BuildOptions build_options(const PipelineConfig& pc) {
    return build_options(pc, pc.representation, pc.category);
}

nn::NetworkConfig network_for(const PipelineConfig& pc, const Dataset& ds) {
    nn::NetworkConfig n = pc.network;
    n.input_len = ds.sample_len;
    n.n_classes = ds.classes.size();
    return n;
}

ReferenceSet reference_for(const PipelineConfig& pc, std::size_t n_classes) {
    if (pc.reference == "binary") return ReferenceSet::Binary;
    if (pc.reference == "multiclass") return ReferenceSet::Multiclass;
    if (pc.reference == "none") return ReferenceSet::None;
    return n_classes == 2 ? ReferenceSet::Binary : ReferenceSet::Multiclass;
}

std::vector<SplitSummary> cmd_split(const PipelineConfig& pc) {
    if (pc.scenarios.empty()) throw Error(ErrorKind::InvalidArgument, "no scenarios configured");
    std::filesystem::create_directories(pc.output_dir);
    std::vector<SplitSummary> out;
    for (const auto& s : pc.scenarios) {
        Capture cap;
        try {
            cap = load_capture(s.path);
        } catch (const Error& e) {
            throw Error(e.kind(), s.path.string() + ": " + e.what());
        }
        const auto res = split(cap.packets, pc.representation);
        SplitSummary sum;
        sum.scenario = s.label;
        sum.packets = cap.stats.total;
        sum.units = res.units.size();
        sum.excluded = res.excluded();
        sum.manifest = pc.output_dir / (s.path.stem().string() + "." +
                                        std::string(to_string(pc.representation)) + ".manifest");
        auto header = pc.provenance();
        header.push_back("scenario=" + s.label);
        header.push_back("source=" + s.path.string());
        write_manifest(sum.manifest, res, cap.stats, header);
        out.push_back(sum);
    }
    return out;
}

EncodeOutput cmd_encode(const PipelineConfig& pc) {
    std::filesystem::create_directories(pc.output_dir);
    EncodeOutput out;
    out.build = build_dataset(build_options(pc));
    out.hex = pc.output_dir / "dataset.hex";
    out.manifest = pc.output_dir / "dataset.manifest";
    // the dataset formats record the seed themselves
    const std::vector<std::string> header{"config_hash=" + pc.config_hash};
    export_hex(out.build.dataset, out.hex, header);
    write_dataset_manifest(out.manifest, out.build.dataset, out.build.stats, header);
    return out;
}

TrainOutput cmd_train(const PipelineConfig& pc, const std::filesystem::path& dataset,
                      const nn::EpochCallback& on_epoch) {
    const Dataset ds = load_or_build(pc, dataset);
    std::filesystem::create_directories(pc.output_dir);
    TrainOutput out;
    out.model = pc.output_dir / "model.rbm";
    out.history = pc.output_dir / "history.csv";
    const auto header = pc.provenance();
    nn::TrainResult res;
    try {
        res = nn::train(ds, network_for(pc, ds), pc.training, on_epoch);
    } catch (const nn::TrainingDiverged& e) {
        nn::write_history(out.history, e.history(), header);
        throw;
    }
    nn::write_history(out.history, res.history, header);
    nn::ModelFile mf{res.network, ds.classes, {}};
    mf.meta["config_hash"] = pc.config_hash;
    mf.meta["seed"] = std::to_string(pc.seed);
    mf.meta["representation"] = std::string(to_string(ds.representation));
    mf.meta["category"] = std::string(to_string(ds.category));
    nn::save_model(out.model, mf);
    out.train_history = std::move(res.history);
    return out;
}

EvalOutput cmd_eval(const PipelineConfig& pc, const std::filesystem::path& model,
                    const std::filesystem::path& dataset) {
    const auto mf = nn::load_model(model);
    const Dataset ds = load_or_build(pc, dataset);
    check_model_matches(mf, ds);
    if (ds.splits.test.empty()) throw Error(ErrorKind::EmptyMatrix, "dataset has no test samples");
    const auto ev = nn::evaluate(mf.network, ds, ds.splits.test, pc.training.threads);

    std::filesystem::create_directories(pc.output_dir);
    EvalOutput out;
    out.confusion = confusion(ev.predictions, ev.labels, ds.classes.size());
    out.report = metrics(out.confusion);
    out.metrics = pc.output_dir / "metrics.txt";
    out.report_text = pc.output_dir / "report.txt";
    out.report_csv = pc.output_dir / "report.csv";
    const auto header = pc.provenance();
    write_metrics(out.metrics, out.report, out.confusion, ds.classes, header);
    const GridCell cell{ds.representation, ds.category, out.report};
    emit_report(std::span(&cell, 1), out.report_text, out.report_csv,
                reference_for(pc, ds.classes.size()), header);
    return out;
}

BenchOutput cmd_bench(const PipelineConfig& pc, const std::filesystem::path& model,
                      const std::filesystem::path& dataset) {
    const auto mf = nn::load_model(model);
    const Dataset ds = load_or_build(pc, dataset);
    check_model_matches(mf, ds);
    if (ds.splits.test.empty()) throw Error(ErrorKind::InvalidArgument, "dataset has no test samples");

    BenchOutput out;
    NamedBench row;
    {
        BenchLock lock(pc.bench_lock);
        out.report = bench_inference(mf.network, ds, pc.bench_repetitions, pc.training.threads);
    }
    const auto ev = nn::evaluate(mf.network, ds, ds.splits.test, pc.training.threads);
    row.name = std::string(experiment_name(ds.representation));
    row.representation = ds.representation;
    row.accuracy = ev.accuracy;
    row.report = out.report;

    std::filesystem::create_directories(pc.output_dir);
    out.report_text = pc.output_dir / "bench.txt";
    out.report_csv = pc.output_dir / "bench.csv";
    write_bench_report(std::span(&row, 1), out.report_text, out.report_csv, true, pc.provenance());
    return out;
}

SweepOutput cmd_sweep(const PipelineConfig& pc, const SweepOptions& opts) {
    if (pc.scenarios.empty()) throw Error(ErrorKind::InvalidArgument, "no scenarios configured");
    struct Job {
        UnitKind rep;
        HeaderCategory cat;
    };
    std::vector<Job> jobs;
    for (auto rep : opts.representations) {
        for (auto cat : opts.categories) jobs.push_back({rep, cat});
    }
    struct Slot {
        std::optional<SweepCellResult> result;
        std::optional<nn::Network> network;
        std::optional<Dataset> dataset;
        std::string error;
    };
    std::vector<Slot> slots(jobs.size());

    unsigned workers = opts.parallel_cells ? opts.parallel_cells : nn::default_threads();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    nn::TrainConfig tc = pc.training;
    if (workers > 1) tc.threads = 1;

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto& job = jobs[i];
            auto& slot = slots[i];
            try {
                auto built = build_dataset(build_options(pc, job.rep, job.cat));
                const Dataset& ds = built.dataset;
                auto res = nn::train(ds, network_for(pc, ds), tc);
                const auto ev = nn::evaluate(res.network, ds, ds.splits.test, tc.threads);
                const auto cm = confusion(ev.predictions, ev.labels, ds.classes.size());
                SweepCellResult r{job.rep, job.cat, ds.samples.size(), res.history.epochs.size(),
                                  metrics(cm), std::nullopt};
                slot.result = std::move(r);
                if (opts.bench && job.cat == HeaderCategory::AllHeaders) {
                    slot.network = std::move(res.network);
                    slot.dataset = std::move(built.dataset);
                }
            } catch (const Error& e) {
                slot.error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    SweepOutput out;
    std::size_t n_classes = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!slots[i].error.empty()) {
            out.warnings.push_back("cell " + std::string(experiment_name(jobs[i].rep)) + " / " +
                                   std::string(to_string(jobs[i].cat)) + " failed: " + slots[i].error);
        }
    }
    if (opts.bench) {
        BenchLock lock(pc.bench_lock);
        for (auto& s : slots) {
            if (s.network && s.result) {
                s.result->bench = bench_inference(*s.network, *s.dataset, pc.bench_repetitions,
                                                  pc.training.threads);
            }
        }
    }
    std::vector<GridCell> cells;
    for (auto& s : slots) {
        if (!s.result) continue;
        cells.push_back({s.result->representation, s.result->category, s.result->report});
        n_classes = std::max(n_classes, s.result->report.f1.size());
        out.cells.push_back(std::move(*s.result));
    }
    std::filesystem::create_directories(pc.output_dir);
    out.report_text = pc.output_dir / "sweep_report.txt";
    out.report_csv = pc.output_dir / "sweep_report.csv";
    const auto header = pc.provenance();
    auto grid_warnings = emit_report(cells, out.report_text, out.report_csv,
                                     reference_for(pc, n_classes ? n_classes : pc.scenarios.size()),
                                     header);
    out.warnings.insert(out.warnings.end(), grid_warnings.begin(), grid_warnings.end());

    if (opts.bench) {
        std::vector<NamedBench> rows;
        for (const auto& c : out.cells) {
            if (!c.bench) continue;
            rows.push_back({std::string(experiment_name(c.representation)), c.representation,
                            c.report.accuracy, *c.bench});
        }
        out.bench_text = pc.output_dir / "sweep_bench.txt";
        write_bench_report(rows, out.bench_text, pc.output_dir / "sweep_bench.csv", true, header);
    }
    return out;
}

std::vector<Scenario> cmd_synth(const PipelineConfig& pc, const std::filesystem::path& dir) {
    auto scenarios = generate_corpus(pc.synth, dir);
    const auto conf = dir / "scenarios.conf";
    std::ofstream out(conf, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + conf.string());
    for (const auto& h : pc.provenance()) out << "# " << h << '\n';
    for (const auto& s : scenarios) out << "scenario = " << s.label << ',' << s.path.filename().string() << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed: " + conf.string());
    return scenarios;
}

std::optional<std::string> embedded_hash(const std::filesystem::path& artifact) {
    std::ifstream in(artifact, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + artifact.string());
    char magic[8] = {};
    in.read(magic, sizeof magic);
    if (in.gcount() == 8 && std::string_view(magic, 8) == "RBYTECNN") {
        const auto m = nn::load_model(artifact);
        const auto it = m.meta.find("config_hash");
        if (it == m.meta.end()) return std::nullopt;
        return it->second;
    }
    in.clear();
    in.seekg(0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# config_hash=", 0) == 0) return trim(line.substr(14));
        if (line.rfind("config_hash=", 0) == 0) return trim(line.substr(12));
    }
    return std::nullopt;
}

void cmd_verify(const PipelineConfig& pc, const std::filesystem::path& artifact) {
    const auto h = embedded_hash(artifact);
    if (!h) throw Error(ErrorKind::InvalidArgument, artifact.string() + " carries no config hash");
    if (*h != pc.config_hash) {
        throw Error(ErrorKind::VerifyMismatch, artifact.string() + " was made with config " + *h +
                                                   ", current config hashes to " + pc.config_hash);
    }
}

}  // namespace rawbyte
