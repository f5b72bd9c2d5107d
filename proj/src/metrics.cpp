#include "rawbyte/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rawbyte/error.hpp"

namespace rawbyte {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < n_classes; ++i) t += at(i, i);
    return t;
}

ConfusionMatrix confusion(std::span<const std::size_t> predictions,
                          std::span<const std::size_t> labels, std::size_t n_classes) {
    if (predictions.size() != labels.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(labels.size()) + " labels");
    }
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_classes || predictions[i] >= n_classes) {
            throw Error(ErrorKind::InvalidLabel, "class id out of range at sample " + std::to_string(i));
        }
        ++cm.at(labels[i], predictions[i]);
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw Error(ErrorKind::EmptyMatrix, "confusion matrix has no samples");
    const std::size_t n = cm.n_classes;
    MetricsReport r;
    r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    r.precision.assign(n, 0.0);
    r.recall.assign(n, 0.0);
    r.f1.assign(n, 0.0);
    r.support.assign(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        std::uint64_t predicted = 0, actual = 0;
        for (std::size_t k = 0; k < n; ++k) {
            predicted += cm.at(k, c);
            actual += cm.at(c, k);
        }
        const double tp = static_cast<double>(cm.at(c, c));
        r.support[c] = actual;
        if (predicted > 0) r.precision[c] = tp / static_cast<double>(predicted);
        if (actual > 0) r.recall[c] = tp / static_cast<double>(actual);
        const double pr = r.precision[c] + r.recall[c];
        if (pr > 0.0) r.f1[c] = 2.0 * r.precision[c] * r.recall[c] / pr;
        r.weighted_f1 += r.f1[c] * static_cast<double>(actual);
    }
    r.weighted_f1 /= static_cast<double>(total);
    return r;
}

namespace {

struct RefRow {
    UnitKind rep;
    HeaderCategory cat;
    ReferenceScores scores;
};

using HC = HeaderCategory;
using UK = UnitKind;

constexpr RefRow kBinaryRefs[] = {
    {UK::Session, HC::AllHeaders, {1.00, 0.97}}, {UK::Session, HC::OnlyEth, {1.00, 0.96}},
    {UK::Session, HC::WithoutEth, {1.00, 0.96}}, {UK::Session, HC::NoHeaders, {1.00, 0.94}},
    {UK::Flow, HC::AllHeaders, {1.00, 0.97}},    {UK::Flow, HC::OnlyEth, {1.00, 0.93}},
    {UK::Flow, HC::WithoutEth, {0.97, 0.96}},    {UK::Flow, HC::NoHeaders, {0.99, 1.00}},
    {UK::Packet, HC::AllHeaders, {1.00, 0.96}},  {UK::Packet, HC::OnlyEth, {0.98, 0.96}},
    {UK::Packet, HC::WithoutEth, {0.98, 0.97}},  {UK::Packet, HC::NoHeaders, {0.99, 0.95}},
};

constexpr RefRow kMulticlassRefs[] = {
    {UK::Session, HC::AllHeaders, {0.99, 0.96}}, {UK::Session, HC::OnlyEth, {0.94, 0.93}},
    {UK::Session, HC::WithoutEth, {0.84, 0.92}}, {UK::Session, HC::NoHeaders, {0.96, 0.92}},
    {UK::Flow, HC::AllHeaders, {0.93, 0.92}},    {UK::Flow, HC::OnlyEth, {0.72, 0.85}},
    {UK::Flow, HC::WithoutEth, {0.79, 0.91}},    {UK::Flow, HC::NoHeaders, {0.91, 0.90}},
    {UK::Packet, HC::AllHeaders, {0.97, 0.93}},  {UK::Packet, HC::OnlyEth, {0.98, 0.93}},
    {UK::Packet, HC::WithoutEth, {0.74, 0.80}},  {UK::Packet, HC::NoHeaders, {0.98, 0.93}},
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::optional<ReferenceScores> reference_scores(ReferenceSet set, UnitKind rep,
                                                HeaderCategory cat) noexcept {
    std::span<const RefRow> rows;
    if (set == ReferenceSet::Binary) rows = kBinaryRefs;
    if (set == ReferenceSet::Multiclass) rows = kMulticlassRefs;
    for (const auto& r : rows) {
        if (r.rep == rep && r.cat == cat) return r.scores;
    }
    return std::nullopt;
}

std::optional<ReferenceCost> reference_cost(UnitKind rep) noexcept {
    switch (rep) {
        case UnitKind::Session: return ReferenceCost{1.00, 2.813, 0.71, 1.171};
        case UnitKind::Flow: return ReferenceCost{1.00, 7.269, 0.82, 0.513};
        case UnitKind::Packet: return ReferenceCost{1.00, 29.626, 2.42, 1.350};
    }
    return std::nullopt;
}

std::string_view experiment_name(UnitKind rep) noexcept {
    switch (rep) {
        case UnitKind::Session: return "ExpS";
        case UnitKind::Flow: return "ExpF";
        case UnitKind::Packet: return "ExpP";
    }
    return "?";
}

std::vector<std::string> emit_report(std::span<const GridCell> cells,
                                     const std::filesystem::path& text_path,
                                     const std::filesystem::path& csv_path,
                                     ReferenceSet reference,
                                     std::span<const std::string> header_lines) {
    std::vector<std::string> warnings;
    const bool with_ref = reference != ReferenceSet::None;

    std::ostringstream text, csv;
    for (const auto& h : header_lines) {
        text << "# " << h << '\n';
        csv << "# " << h << '\n';
    }
    char line[160];
    if (with_ref) {
        std::snprintf(line, sizeof line, "%-14s %-12s %9s %9s %9s %9s\n", "representation", "header",
                      "accuracy", "f1", "ref_acc", "ref_f1");
        csv << "representation,header,accuracy,f1,ref_accuracy,ref_f1\n";
    } else {
        std::snprintf(line, sizeof line, "%-14s %-12s %9s %9s\n", "representation", "header",
                      "accuracy", "f1");
        csv << "representation,header,accuracy,f1\n";
    }
    text << line;

    if (cells.empty()) warnings.emplace_back("IncompleteGrid: no results to report");
    for (UnitKind rep : kGridRepresentations) {
        for (HeaderCategory cat : kAllCategories) {
            const GridCell* found = nullptr;
            for (const auto& c : cells) {
                if (c.representation == rep && c.category == cat) found = &c;
            }
            const std::string r_name(experiment_name(rep));
            const std::string c_name(to_string(cat));
            if (!found) {
                if (!cells.empty()) {
                    warnings.push_back("IncompleteGrid: missing " + r_name + " / " + c_name);
                }
                continue;
            }
            const auto acc = fmt("%.4f", found->report.accuracy);
            const auto f1 = fmt("%.4f", found->report.weighted_f1);
            if (with_ref) {
                const auto ref = reference_scores(reference, rep, cat);
                const auto ra = ref ? fmt("%.2f", ref->accuracy) : std::string("-");
                const auto rf = ref ? fmt("%.2f", ref->f1) : std::string("-");
                std::snprintf(line, sizeof line, "%-14s %-12s %9s %9s %9s %9s\n", r_name.c_str(),
                              c_name.c_str(), acc.c_str(), f1.c_str(), ra.c_str(), rf.c_str());
                csv << r_name << ',' << c_name << ',' << acc << ',' << f1 << ',' << ra << ',' << rf
                    << '\n';
            } else {
                std::snprintf(line, sizeof line, "%-14s %-12s %9s %9s\n", r_name.c_str(),
                              c_name.c_str(), acc.c_str(), f1.c_str());
                csv << r_name << ',' << c_name << ',' << acc << ',' << f1 << '\n';
            }
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
    return warnings;
}

void write_metrics(const std::filesystem::path& path, const MetricsReport& report,
                   const ConfusionMatrix& cm, std::span<const std::string> class_names,
                   std::span<const std::string> header_lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write metrics: " + path.string());
    for (const auto& h : header_lines) out << "# " << h << '\n';
    out << "accuracy=" << fmt("%.17g", report.accuracy) << '\n';
    out << "weighted_f1=" << fmt("%.17g", report.weighted_f1) << '\n';
    out << "total=" << cm.total() << '\n';
    for (std::size_t c = 0; c < report.f1.size(); ++c) {
        const std::string name = c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
        out << "class." << name << ".precision=" << fmt("%.17g", report.precision[c]) << '\n';
        out << "class." << name << ".recall=" << fmt("%.17g", report.recall[c]) << '\n';
        out << "class." << name << ".f1=" << fmt("%.17g", report.f1[c]) << '\n';
        out << "class." << name << ".support=" << report.support[c] << '\n';
    }
    out << "confusion=";
    for (std::size_t i = 0; i < cm.counts.size(); ++i) out << (i ? " " : "") << cm.counts[i];
    out << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace rawbyte
