#include "rawbyte/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "rawbyte/error.hpp"

namespace rawbyte {

std::string_view to_string(HeaderCategory cat) noexcept {
    switch (cat) {
    case HeaderCategory::AllHeaders: return "all-headers";
    case HeaderCategory::OnlyEth: return "only-eth";
    case HeaderCategory::WithoutEth: return "without-eth";
    case HeaderCategory::NoHeaders: return "no-headers";
    }
    return "?";
}

std::optional<HeaderCategory> parse_category(std::string_view name) noexcept {
    for (auto c : kAllCategories) {
        if (name == to_string(c)) return c;
    }
    if (name == "all") return HeaderCategory::AllHeaders;
    if (name == "none") return HeaderCategory::NoHeaders;
    return std::nullopt;
}

std::vector<std::uint8_t> slice_category(std::span<const std::uint8_t> pkt,
                                         const HeaderLayout& layout, HeaderCategory cat) {
    const std::size_t n = pkt.size();
    const std::size_t eth_end = layout.eth ? std::min(layout.eth->end(), n) : 0;
    const std::size_t net_start = layout.net ? layout.net->off : eth_end;
    const std::size_t trans_start =
        layout.trans ? layout.trans->off : (layout.net ? layout.net->end() : net_start);

    auto tail = [&](std::size_t from) {
        from = std::min(from, n);
        return std::vector<std::uint8_t>(pkt.begin() + static_cast<std::ptrdiff_t>(from),
                                         pkt.end());
    };

    switch (cat) {
    case HeaderCategory::AllHeaders:
        return {pkt.begin(), pkt.end()};
    case HeaderCategory::OnlyEth: {
        std::vector<std::uint8_t> out(pkt.begin(), pkt.begin() + static_cast<std::ptrdiff_t>(eth_end));
        const auto rest = tail(trans_start);
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    }
    case HeaderCategory::WithoutEth:
        return tail(net_start);
    case HeaderCategory::NoHeaders:
        return tail(trans_start);
    }
    return {};
}

std::vector<double> ByteSample::values() const {
    std::vector<double> v(bytes.size());
    values_into(v);
    return v;
}

void ByteSample::values_into(std::span<double> out) const {
    for (std::size_t i = 0; i < bytes.size() && i < out.size(); ++i) {
        out[i] = bytes[i] / 255.0;
    }
}

EncodedUnit encode_unit(const TrafficUnit& unit, HeaderCategory cat, std::size_t sample_len) {
    if (sample_len == 0) {
        throw Error(ErrorKind::InvalidArgument, "sample length must be positive");
    }
    EncodedUnit enc;
    auto& bytes = enc.sample.bytes;
    bytes.reserve(sample_len);
    std::size_t contributed = 0;
    for (const auto& p : unit.packets) {
        const auto s = slice_category(p.raw.data, p.layout, cat);
        contributed += s.size();
        const std::size_t room = sample_len - bytes.size();
        bytes.insert(bytes.end(), s.begin(),
                     s.begin() + static_cast<std::ptrdiff_t>(std::min(room, s.size())));
    }
    if (contributed == 0) {
        throw Error(ErrorKind::EmptyUnit, "unit " + key_to_string(unit.key) +
                                              " contributes no bytes under " +
                                              std::string(to_string(cat)));
    }
    enc.truncated_bytes = contributed - bytes.size();
    bytes.resize(sample_len, 0);
    enc.sample.meta.representation = unit.kind;
    enc.sample.meta.category = cat;
    enc.sample.meta.unit_key = key_to_string(unit.key);
    return enc;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto& s : samples) {
        if (s.label < counts.size()) ++counts[s.label];
    }
    return counts;
}

std::array<std::size_t, 3> allocate_split(std::size_t count, const SplitRatios& ratios) {
    const std::array<double, 3> r = {ratios.train, ratios.val, ratios.test};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> frac{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = static_cast<double>(count) * r[i];
        sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        frac[i] = exact - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
    for (int k = 0; assigned < count; k = (k + 1) % 3) {
        if (r[order[k]] > 0) {
            ++sizes[order[k]];
            ++assigned;
        }
    }
    return sizes;
}

Splits stratified_split(std::span<const std::size_t> labels, std::size_t n_classes,
                        const SplitRatios& ratios, std::uint64_t seed,
                        std::span<const std::string> class_names) {
    const double sum = ratios.train + ratios.val + ratios.test;
    if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 || std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument, "split ratios must be non-negative and sum to 1");
    }
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_classes) {
            throw Error(ErrorKind::InvalidLabel, "label " + std::to_string(labels[i]) +
                                                     " outside vocabulary of " +
                                                     std::to_string(n_classes));
        }
        by_class[labels[i]].push_back(i);
    }

    const std::array<double, 3> r = {ratios.train, ratios.val, ratios.test};
    std::mt19937_64 rng(seed);
    Splits out;
    std::array<std::vector<std::size_t>*, 3> parts = {&out.train, &out.val, &out.test};
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& idx = by_class[c];
        const auto sizes = allocate_split(idx.size(), ratios);
        for (int i = 0; i < 3; ++i) {
            if (r[i] > 0 && sizes[i] == 0) {
                const std::string name =
                    c < class_names.size() ? class_names[c] : "class " + std::to_string(c);
                throw Error(ErrorKind::ClassTooSmall,
                            "class '" + name + "' has " + std::to_string(idx.size()) +
                                " samples, too few to populate every split");
            }
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        auto it = idx.begin();
        for (int i = 0; i < 3; ++i) {
            parts[i]->insert(parts[i]->end(), it, it + static_cast<std::ptrdiff_t>(sizes[i]));
            it += static_cast<std::ptrdiff_t>(sizes[i]);
        }
    }
    for (auto* p : parts) {
        std::sort(p->begin(), p->end());
    }
    return out;
}

BuildResult build_dataset(const BuildOptions& opts) {
    if (opts.sample_len == 0) {
        throw Error(ErrorKind::InvalidArgument, "sample length must be positive");
    }
    BuildResult res;
    Dataset& ds = res.dataset;
    ds.seed = opts.seed;
    ds.sample_len = opts.sample_len;
    ds.representation = opts.representation;
    ds.category = opts.category;

    for (const auto& sc : opts.scenarios) {
        if (sc.label.empty() || sc.label.find_first_of(",\n\r") != std::string::npos) {
            throw Error(ErrorKind::InvalidArgument,
                        "class label '" + sc.label + "' must be non-empty without commas");
        }
        if (std::find(ds.classes.begin(), ds.classes.end(), sc.label) == ds.classes.end()) {
            ds.classes.push_back(sc.label);
        }
    }
    if (ds.classes.size() < std::max<std::size_t>(opts.min_classes, 2)) {
        throw Error(ErrorKind::InvalidArgument,
                    "need at least " + std::to_string(std::max<std::size_t>(opts.min_classes, 2)) +
                        " classes, got " + std::to_string(ds.classes.size()));
    }

    for (const auto& sc : opts.scenarios) {
        const std::size_t label =
            static_cast<std::size_t>(std::find(ds.classes.begin(), ds.classes.end(), sc.label) -
                                     ds.classes.begin());
        Capture cap;
        try {
            cap = load_capture(sc.path);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " (scenario " + sc.label + ")");
        }
        auto split_res = split(cap.packets, opts.representation);
        res.stats.packets_total += cap.stats.total;
        res.stats.packets_unparsable += split_res.excluded_unparsable;
        res.stats.packets_no_tuple += split_res.excluded_no_tuple;

        const std::string scenario_name = sc.path.filename().string();
        for (const auto& unit : split_res.units) {
            EncodedUnit enc;
            try {
                enc = encode_unit(unit, opts.category, opts.sample_len);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::EmptyUnit) throw;
                ++res.stats.empty_units;
                continue;
            }
            if (enc.truncated_bytes > 0) {
                ++res.stats.truncated_units;
                res.stats.truncated_bytes += enc.truncated_bytes;
            }
            enc.sample.label = label;
            enc.sample.meta.scenario = scenario_name;
            ds.samples.push_back(std::move(enc.sample));
        }
    }

    std::vector<std::size_t> labels(ds.samples.size());
    std::transform(ds.samples.begin(), ds.samples.end(), labels.begin(),
                   [](const ByteSample& s) { return s.label; });
    ds.splits = stratified_split(labels, ds.classes.size(), opts.ratios, opts.seed, ds.classes);
    return res;
}

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

[[noreturn]] void bad_line(const std::filesystem::path& path, std::size_t line,
                           const std::string& why) {
    throw Error(ErrorKind::BadHexLine,
                path.string() + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

void export_hex(const Dataset& ds, const std::filesystem::path& path,
                std::span<const std::string> header_lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write hex file: " + path.string());
    }
    std::string split_map(ds.samples.size(), 't');
    for (auto i : ds.splits.val) split_map[i] = 'v';
    for (auto i : ds.splits.test) split_map[i] = 'e';

    out << "# rawbyte-hex 1\n";
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << "# classes=";
    for (std::size_t i = 0; i < ds.classes.size(); ++i) {
        out << (i ? "," : "") << ds.classes[i];
    }
    out << "\n# sample_len=" << ds.sample_len << "\n# representation="
        << to_string(ds.representation) << "\n# category=" << to_string(ds.category)
        << "\n# seed=" << ds.seed << "\n# splits=" << split_map << '\n';

    std::string line;
    for (const auto& s : ds.samples) {
        out << "#@ " << s.meta.scenario << '\t' << s.meta.unit_key << '\n';
        line.assign(std::to_string(s.label));
        line.push_back(',');
        for (auto b : s.bytes) {
            line.push_back(kHexDigits[b >> 4]);
            line.push_back(kHexDigits[b & 0xf]);
        }
        out << line << '\n';
    }
    if (!out) {
        throw Error(ErrorKind::Io, "write failed: " + path.string());
    }
}

Dataset import_hex(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open hex file: " + path.string());
    }
    Dataset ds;
    std::string split_map;
    bool have_classes = false;
    bool have_len = false;
    std::optional<std::pair<std::string, std::string>> pending_meta;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#@ ", 0) == 0) {
            const auto body = line.substr(3);
            const auto tab = body.find('\t');
            pending_meta = {body.substr(0, tab),
                            tab == std::string::npos ? std::string{} : body.substr(tab + 1)};
            continue;
        }
        if (line[0] == '#') {
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const auto key = body.substr(0, eq);
            const auto value = body.substr(eq + 1);
            try {
                if (key == "classes") {
                    ds.classes = split_commas(value);
                    have_classes = true;
                } else if (key == "sample_len") {
                    ds.sample_len = std::stoull(value);
                    have_len = true;
                } else if (key == "seed") {
                    ds.seed = std::stoull(value);
                } else if (key == "splits") {
                    split_map = value;
                } else if (key == "representation") {
                    if (auto k = parse_unit_kind(value)) ds.representation = *k;
                } else if (key == "category") {
                    if (auto c = parse_category(value)) ds.category = *c;
                }
            } catch (const std::exception&) {
                bad_line(path, lineno, "unreadable header value for '" + key + "'");
            }
            continue;
        }

        const auto comma = line.find(',');
        if (comma == std::string::npos || comma == 0) {
            bad_line(path, lineno, "expected label,hexdigits");
        }
        ByteSample s;
        const auto label_str = line.substr(0, comma);
        if (label_str.find_first_not_of("0123456789") != std::string::npos) {
            bad_line(path, lineno, "label is not a non-negative integer");
        }
        s.label = std::stoull(label_str);
        const std::string_view hex(line.data() + comma + 1, line.size() - comma - 1);
        if (hex.size() % 2 != 0) {
            bad_line(path, lineno, "odd number of hex digits");
        }
        s.bytes.resize(hex.size() / 2);
        for (std::size_t i = 0; i < s.bytes.size(); ++i) {
            const int hi = hex_value(hex[2 * i]);
            const int lo = hex_value(hex[2 * i + 1]);
            if (hi < 0 || lo < 0) {
                bad_line(path, lineno, "non-hex character at column " +
                                           std::to_string(comma + 2 + 2 * i));
            }
            s.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
        }
        if (!have_len && ds.samples.empty()) {
            ds.sample_len = s.bytes.size();
        }
        if (s.bytes.size() != ds.sample_len) {
            bad_line(path, lineno, "expected " + std::to_string(2 * ds.sample_len) +
                                       " hex digits, found " + std::to_string(hex.size()));
        }
        if (have_classes && s.label >= ds.classes.size()) {
            bad_line(path, lineno, "label " + label_str + " outside class vocabulary");
        }
        s.meta.representation = ds.representation;
        s.meta.category = ds.category;
        if (pending_meta) {
            s.meta.scenario = std::move(pending_meta->first);
            s.meta.unit_key = std::move(pending_meta->second);
            pending_meta.reset();
        }
        ds.samples.push_back(std::move(s));
    }

    if (!have_classes) {
        std::size_t n = 0;
        for (const auto& s : ds.samples) n = std::max(n, s.label + 1);
        for (std::size_t i = 0; i < n; ++i) ds.classes.push_back("class" + std::to_string(i));
    }
    if (!split_map.empty() && split_map.size() != ds.samples.size()) {
        throw Error(ErrorKind::BadHexLine, path.string() + ": split map covers " +
                                               std::to_string(split_map.size()) + " samples, file has " +
                                               std::to_string(ds.samples.size()));
    }
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const char part = split_map.empty() ? 't' : split_map[i];
        switch (part) {
        case 't': ds.splits.train.push_back(i); break;
        case 'v': ds.splits.val.push_back(i); break;
        case 'e': ds.splits.test.push_back(i); break;
        default:
            throw Error(ErrorKind::BadHexLine,
                        path.string() + ": unknown split tag '" + std::string(1, part) + "'");
        }
    }
    return ds;
}

void write_dataset_manifest(const std::filesystem::path& path, const Dataset& ds,
                            const BuildStats& stats, std::span<const std::string> header_lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write dataset manifest: " + path.string());
    }
    for (const auto& h : header_lines) out << h << '\n';
    out << "sample_len=" << ds.sample_len << '\n'
        << "representation=" << to_string(ds.representation) << '\n'
        << "category=" << to_string(ds.category) << '\n'
        << "seed=" << ds.seed << '\n'
        << "scaling=byte/255\n"
        << "padding=zero\n"
        << "samples=" << ds.samples.size() << '\n';
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < ds.classes.size(); ++c) {
        out << "class." << ds.classes[c] << '=' << counts[c] << '\n';
    }
    out << "split.train=" << ds.splits.train.size() << '\n'
        << "split.val=" << ds.splits.val.size() << '\n'
        << "split.test=" << ds.splits.test.size() << '\n'
        << "packets_total=" << stats.packets_total << '\n'
        << "packets_unparsable=" << stats.packets_unparsable << '\n'
        << "packets_no_tuple=" << stats.packets_no_tuple << '\n'
        << "empty_units=" << stats.empty_units << '\n'
        << "truncated_units=" << stats.truncated_units << '\n'
        << "truncated_bytes=" << stats.truncated_bytes << '\n';
    if (!out) {
        throw Error(ErrorKind::Io, "write failed: " + path.string());
    }
}

}  // namespace rawbyte
