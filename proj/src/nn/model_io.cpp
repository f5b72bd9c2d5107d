#include "rawbyte/nn/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rawbyte/error.hpp"

namespace rawbyte::nn {

namespace {

constexpr char kMagic[8] = {'R', 'B', 'Y', 'T', 'E', 'C', 'N', 'N'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    std::vector<std::uint8_t>& buffer() { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(const std::vector<std::uint8_t>& buf, std::size_t end, std::string path)
        : buf_(buf), end_(end), path_(std::move(path)) {}

    void need(std::size_t n) {
        if (pos_ + n > end_) {
            throw Error(ErrorKind::CorruptModelFile, path_ + ": model file is truncated");
        }
    }
    std::uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(buf_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(buf_[pos_++]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

private:
    const std::vector<std::uint8_t>& buf_;
    std::size_t end_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* p, std::size_t n) {
    return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), p, static_cast<uInt>(n)));
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    const auto& net = model.network;
    const auto& c = net.config();
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kModelFormatVersion);
    w.u64(c.input_len);
    w.u64(c.conv1_filters);
    w.u64(c.conv2_filters);
    w.u64(c.kernel);
    w.u64(c.stride);
    w.u64(c.pool);
    w.f64(c.dropout_rate);
    w.u64(c.n_classes);
    w.u8(static_cast<std::uint8_t>(c.head));
    w.u8(static_cast<std::uint8_t>(c.padding));
    w.u32(static_cast<std::uint32_t>(model.classes.size()));
    for (const auto& name : model.classes) w.str(name);
    w.u32(static_cast<std::uint32_t>(model.meta.size()));
    for (const auto& [k, v] : model.meta) {
        w.str(k);
        w.str(v);
    }
    const auto params = net.params();
    w.u64(params.size());
    for (double p : params) w.f64(p);
    auto& buf = w.buffer();
    w.u32(crc_of(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write model: " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open model: " + path.string());
    const std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
    const std::string name = path.string();
    auto corrupt = [&](const std::string& why) {
        return Error(ErrorKind::CorruptModelFile, name + ": " + why);
    };

    if (buf.size() < sizeof kMagic + 8 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
        throw corrupt(buf.size() < sizeof kMagic + 8 ? "model file is truncated"
                                                      : "not a model file (bad magic)");
    }
    Reader head(buf, buf.size(), name);
    head.seek(sizeof kMagic);
    const std::uint32_t version = head.u32();
    if (version != kModelFormatVersion) {
        throw corrupt("model format version " + std::to_string(version) + ", expected " +
                      std::to_string(kModelFormatVersion));
    }

    const std::size_t body_end = buf.size() - 4;
    Reader tail(buf, buf.size(), name);
    tail.seek(body_end);
    if (tail.u32() != crc_of(buf.data(), body_end)) {
        throw corrupt("checksum mismatch (file truncated or modified)");
    }

    Reader r(buf, body_end, name);
    r.seek(head.pos());
    NetworkConfig c;
    c.input_len = r.u64();
    c.conv1_filters = r.u64();
    c.conv2_filters = r.u64();
    c.kernel = r.u64();
    c.stride = r.u64();
    c.pool = r.u64();
    c.dropout_rate = r.f64();
    c.n_classes = r.u64();
    const auto head_kind = r.u8();
    const auto padding = r.u8();
    if (head_kind > 1 || padding > 1) throw corrupt("unknown head or padding code");
    c.head = static_cast<Head>(head_kind);
    c.padding = static_cast<Padding>(padding);

    ModelFile m;
    const std::uint32_t n_classes = r.u32();
    for (std::uint32_t i = 0; i < n_classes; ++i) m.classes.push_back(r.str());
    const std::uint32_t n_meta = r.u32();
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        auto k = r.str();
        m.meta[k] = r.str();
    }

    try {
        m.network = Network(c, 0);
    } catch (const Error& e) {
        throw corrupt(std::string("invalid network config: ") + e.what());
    }
    const std::uint64_t count = r.u64();
    if (count != m.network.param_count()) {
        throw corrupt("parameter count " + std::to_string(count) + " does not match config (" +
                      std::to_string(m.network.param_count()) + ")");
    }
    auto params = m.network.mutable_params();
    for (auto& p : params) p = r.f64();
    if (r.pos() != body_end) throw corrupt("trailing bytes before checksum");
    return m;
}

}  // namespace rawbyte::nn
