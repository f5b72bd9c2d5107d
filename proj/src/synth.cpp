#include "rawbyte/synth.hpp"

#include <algorithm>
#include <random>

#include "rawbyte/error.hpp"

namespace rawbyte {

namespace {

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}

void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    put16(b, static_cast<std::uint16_t>(v >> 16));
    put16(b, static_cast<std::uint16_t>(v));
}

void set16(std::vector<std::uint8_t>& b, std::size_t off, std::uint16_t v) {
    b[off] = static_cast<std::uint8_t>(v >> 8);
    b[off + 1] = static_cast<std::uint8_t>(v);
}

constexpr std::size_t kEth = 14;
constexpr std::size_t kIp = 20;

// Ethernet + IPv4 headers with the IPv4 checksum left at zero.
std::vector<std::uint8_t> eth_ip(const FrameFields& f, std::uint8_t proto, std::size_t l4_len) {
    std::vector<std::uint8_t> b;
    b.reserve(kEth + kIp + l4_len);
    b.insert(b.end(), f.dst_mac.begin(), f.dst_mac.end());
    b.insert(b.end(), f.src_mac.begin(), f.src_mac.end());
    put16(b, 0x0800);
    b.push_back(0x45);
    b.push_back(0);
    put16(b, static_cast<std::uint16_t>(kIp + l4_len));
    put16(b, f.ip_id);
    put16(b, f.dont_fragment ? 0x4000 : 0);
    b.push_back(f.ttl);
    b.push_back(proto);
    put16(b, 0);
    b.insert(b.end(), f.src_ip.begin(), f.src_ip.end());
    b.insert(b.end(), f.dst_ip.begin(), f.dst_ip.end());
    set16(b, kEth + 10, internet_checksum(std::span(b).subspan(kEth, kIp)));
    return b;
}

std::uint32_t pseudo_header_sum(const FrameFields& f, std::uint8_t proto, std::size_t l4_len) {
    std::uint32_t sum = 0;
    sum += (f.src_ip[0] << 8) | f.src_ip[1];
    sum += (f.src_ip[2] << 8) | f.src_ip[3];
    sum += (f.dst_ip[0] << 8) | f.dst_ip[1];
    sum += (f.dst_ip[2] << 8) | f.dst_ip[3];
    sum += proto;
    sum += static_cast<std::uint32_t>(l4_len);
    return sum;
}

}  // namespace

std::uint16_t internet_checksum(std::span<const std::uint8_t> data, std::uint32_t initial) {
    std::uint64_t sum = initial;
    std::size_t i = 0;
    for (; i + 1 < data.size(); i += 2) sum += (data[i] << 8) | data[i + 1];
    if (i < data.size()) sum += data[i] << 8;
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum & 0xffff);
}

std::vector<std::uint8_t> build_udp_frame(const FrameFields& f, std::span<const std::uint8_t> payload) {
    const std::size_t l4 = 8 + payload.size();
    if (kIp + l4 > 0xffff) throw Error(ErrorKind::InvalidArgument, "payload too large for IPv4");
    auto b = eth_ip(f, 17, l4);
    put16(b, f.src_port);
    put16(b, f.dst_port);
    put16(b, static_cast<std::uint16_t>(l4));
    put16(b, 0);
    b.insert(b.end(), payload.begin(), payload.end());
    std::uint16_t csum =
        internet_checksum(std::span(b).subspan(kEth + kIp), pseudo_header_sum(f, 17, l4));
    if (csum == 0) csum = 0xffff;
    set16(b, kEth + kIp + 6, csum);
    return b;
}

std::vector<std::uint8_t> build_tcp_frame(const FrameFields& f, std::span<const std::uint8_t> payload) {
    const std::size_t l4 = 20 + payload.size();
    if (kIp + l4 > 0xffff) throw Error(ErrorKind::InvalidArgument, "payload too large for IPv4");
    auto b = eth_ip(f, 6, l4);
    put16(b, f.src_port);
    put16(b, f.dst_port);
    put32(b, f.seq);
    put32(b, f.ack);
    b.push_back(5 << 4);
    b.push_back(f.tcp_flags);
    put16(b, f.window);
    put16(b, 0);
    put16(b, 0);
    b.insert(b.end(), payload.begin(), payload.end());
    set16(b, kEth + kIp + 16,
          internet_checksum(std::span(b).subspan(kEth + kIp), pseudo_header_sum(f, 6, l4)));
    return b;
}

SynthSpec default_synth_spec(std::size_t n_classes, std::uint64_t seed, std::size_t signature_len) {
    SynthSpec s;
    s.seed = seed;
    for (std::size_t c = 0; c < n_classes; ++c) {
        SynthClass k;
        k.name = "class" + std::to_string(c);
        // 0x11 * (c + 1) is distinct mod 256 for c < 15, so classes differ at every position.
        for (std::size_t i = 0; i < signature_len; ++i) {
            const auto base = static_cast<std::uint8_t>(0x11 * (c + 1) + 0x3b * i);
            k.signature.pattern.push_back(static_cast<std::uint8_t>(base ^ (0x5a * i)));
        }
        s.classes.push_back(std::move(k));
    }
    return s;
}

void validate(const SynthSpec& spec) {
    if (spec.classes.empty()) throw Error(ErrorKind::InvalidArgument, "synth spec has no classes");
    if (spec.payload_min > spec.payload_max) {
        throw Error(ErrorKind::InvalidArgument, "payload_min exceeds payload_max");
    }
    if (spec.payload_max > 1400) throw Error(ErrorKind::InvalidArgument, "payload_max above 1400");
    if (spec.tuple_pool == 0 || spec.tuple_pool > 65000) {
        throw Error(ErrorKind::InvalidArgument, "tuple_pool must be in [1, 65000]");
    }
    if (!(spec.reply_fraction >= 0.0 && spec.reply_fraction <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "reply_fraction must be in [0, 1]");
    }
    if (spec.classes.size() > 200) throw Error(ErrorKind::InvalidArgument, "at most 200 classes");
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
        const auto& a = spec.classes[i];
        if (a.name.empty() || a.name.find_first_of(",/\\\n") != std::string::npos) {
            throw Error(ErrorKind::InvalidArgument, "bad class name '" + a.name + "'");
        }
        if (a.signature.pattern.empty()) {
            throw Error(ErrorKind::SpecConflict, "class " + a.name + " has an empty signature");
        }
        if (a.signature.payload_offset + a.signature.pattern.size() > spec.payload_min) {
            throw Error(ErrorKind::SpecConflict,
                        "signature of class " + a.name + " ends at payload byte " +
                            std::to_string(a.signature.payload_offset + a.signature.pattern.size()) +
                            ", past payload_min " + std::to_string(spec.payload_min));
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& b = spec.classes[j];
            if (a.name == b.name) throw Error(ErrorKind::InvalidArgument, "duplicate class " + a.name);
            const std::size_t lo = std::max(a.signature.payload_offset, b.signature.payload_offset);
            const std::size_t hi =
                std::min(a.signature.payload_offset + a.signature.pattern.size(),
                         b.signature.payload_offset + b.signature.pattern.size());
            bool differs = false;
            for (std::size_t p = lo; p < hi && !differs; ++p) {
                differs = a.signature.pattern[p - a.signature.payload_offset] !=
                          b.signature.pattern[p - b.signature.payload_offset];
            }
            if (!differs) {
                throw Error(ErrorKind::SpecConflict, "signatures of " + b.name + " and " + a.name +
                                                         " agree at every shared payload position");
            }
        }
    }
}

std::vector<RawPacket> synth_class_packets(const SynthSpec& spec, std::size_t class_index) {
    validate(spec);
    if (class_index >= spec.classes.size()) {
        throw Error(ErrorKind::InvalidArgument, "class index out of range");
    }
    const auto& cls = spec.classes[class_index];
    std::mt19937_64 rng(spec.seed * 0x100000001b3ULL + class_index);
    std::uniform_int_distribution<std::size_t> pick_conv(0, spec.tuple_pool - 1);
    std::uniform_int_distribution<std::size_t> pick_len(spec.payload_min, spec.payload_max);
    std::uniform_int_distribution<int> pick_byte(0, 255);
    std::bernoulli_distribution is_reply(spec.reply_fraction);
    static constexpr std::uint16_t kServerPorts[] = {53, 80, 123, 443, 1883, 5683, 8080, 23};

    struct Conv {
        FrameFields fwd;
        bool tcp;
        std::uint32_t seq_c, seq_s;
    };
    std::vector<Conv> convs(spec.tuple_pool);
    const auto c8 = static_cast<std::uint8_t>(class_index);
    for (std::size_t s = 0; s < spec.tuple_pool; ++s) {
        auto& cv = convs[s];
        cv.fwd.src_ip = {10, static_cast<std::uint8_t>(16 + class_index),
                         static_cast<std::uint8_t>(s / 250), static_cast<std::uint8_t>(s % 250 + 1)};
        cv.fwd.dst_ip = {192, 168, c8, 1};
        cv.fwd.src_mac = {0x02, 0x10, c8, static_cast<std::uint8_t>(s >> 8),
                          static_cast<std::uint8_t>(s), 0x01};
        cv.fwd.dst_mac = {0x02, 0x20, c8, 0, 0, 0x01};
        cv.fwd.src_port = static_cast<std::uint16_t>(1024 + (s * 7919 + class_index * 131) % 60000);
        cv.fwd.dst_port = kServerPorts[(s + class_index) % std::size(kServerPorts)];
        cv.tcp = spec.transport == SynthTransport::Tcp ||
                 (spec.transport == SynthTransport::Mixed && s % 2 == 1);
        cv.seq_c = static_cast<std::uint32_t>(rng());
        cv.seq_s = static_cast<std::uint32_t>(rng());
    }

    std::vector<RawPacket> out;
    out.reserve(spec.packets_per_class);
    const std::uint32_t t0 = 1'600'000'000u + static_cast<std::uint32_t>(class_index) * 3600u;
    std::vector<std::uint8_t> payload;
    for (std::size_t i = 0; i < spec.packets_per_class; ++i) {
        auto& cv = convs[pick_conv(rng)];
        const bool reply = is_reply(rng);
        payload.resize(pick_len(rng));
        for (auto& b : payload) b = static_cast<std::uint8_t>(pick_byte(rng));
        std::copy(cls.signature.pattern.begin(), cls.signature.pattern.end(),
                  payload.begin() + static_cast<std::ptrdiff_t>(cls.signature.payload_offset));

        FrameFields f = cv.fwd;
        if (reply) {
            std::swap(f.src_ip, f.dst_ip);
            std::swap(f.src_port, f.dst_port);
            std::swap(f.src_mac, f.dst_mac);
        }
        f.ip_id = static_cast<std::uint16_t>(i + 1);
        f.dont_fragment = true;
        f.ttl = reply ? 64 : 128;
        RawPacket pkt;
        if (cv.tcp) {
            auto& mine = reply ? cv.seq_s : cv.seq_c;
            f.seq = mine;
            f.ack = reply ? cv.seq_c : cv.seq_s;
            mine += static_cast<std::uint32_t>(payload.size());
            pkt.data = build_tcp_frame(f, payload);
        } else {
            pkt.data = build_udp_frame(f, payload);
        }
        const std::uint64_t micros = i * 1000 + 137 * (i % 7);
        pkt.ts_sec = t0 + static_cast<std::uint32_t>(micros / 1'000'000);
        pkt.ts_frac = static_cast<std::uint32_t>(micros % 1'000'000);
        pkt.orig_len = static_cast<std::uint32_t>(pkt.data.size());
        out.push_back(std::move(pkt));
    }
    return out;
}

void generate_fixture(const SynthSpec& spec, const std::filesystem::path& path) {
    validate(spec);
    PcapWriter w(path);
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        for (const auto& p : synth_class_packets(spec, c)) w.write(p);
    }
    w.flush();
}

std::vector<Scenario> generate_corpus(const SynthSpec& spec, const std::filesystem::path& dir) {
    validate(spec);
    std::filesystem::create_directories(dir);
    std::vector<Scenario> out;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const auto path = dir / (spec.classes[c].name + ".pcap");
        const auto pkts = synth_class_packets(spec, c);
        write_pcap(path, pkts);
        out.push_back({path, spec.classes[c].name});
    }
    return out;
}

}  // namespace rawbyte
