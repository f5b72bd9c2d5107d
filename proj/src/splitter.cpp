#include "rawbyte/splitter.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "rawbyte/error.hpp"

namespace rawbyte {

std::string_view to_string(UnitKind kind) noexcept {
    switch (kind) {
    case UnitKind::Packet: return "packet";
    case UnitKind::Flow: return "flow";
    case UnitKind::Session: return "session";
    }
    return "?";
}

std::optional<UnitKind> parse_unit_kind(std::string_view name) noexcept {
    if (name == "packet") return UnitKind::Packet;
    if (name == "flow") return UnitKind::Flow;
    if (name == "session") return UnitKind::Session;
    return std::nullopt;
}

SessionKey SessionKey::canonical(const FiveTuple& t) noexcept {
    Endpoint src{t.src_ip, t.src_port};
    Endpoint dst{t.dst_ip, t.dst_port};
    if (dst < src) {
        std::swap(src, dst);
    }
    return {src, dst, t.proto};
}

std::string SessionKey::to_string() const {
    // Reuse the tuple formatter, then mark the key as undirected.
    FiveTuple t{a.ip, b.ip, a.port, b.port, proto};
    auto s = t.to_string();
    s.replace(s.find('>'), 1, "<>");
    return s;
}

std::string key_to_string(const UnitKey& key) {
    return std::visit(
        [](const auto& k) -> std::string {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PacketIndex>) {
                return "#" + std::to_string(k.value);
            } else {
                return k.to_string();
            }
        },
        key);
}

std::size_t TrafficUnit::byte_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : packets) {
        n += p.raw.data.size();
    }
    return n;
}

namespace {

void sort_by_time(std::vector<ParsedPacket>& pkts) {
    std::stable_sort(pkts.begin(), pkts.end(), [](const ParsedPacket& x, const ParsedPacket& y) {
        if (x.raw.ts_sec != y.raw.ts_sec) return x.raw.ts_sec < y.raw.ts_sec;
        return x.raw.ts_frac < y.raw.ts_frac;
    });
}

template <typename Key, typename KeyOf>
SplitResult group_by(std::span<const ParsedPacket> capture, UnitKind kind, KeyOf key_of) {
    SplitResult r;
    std::unordered_map<Key, std::size_t> slot;
    for (const auto& p : capture) {
        if (!p.layout.parsable()) {
            ++r.excluded_unparsable;
            continue;
        }
        const auto tuple = five_tuple_of(p.raw, p.layout);
        if (!tuple) {
            ++r.excluded_no_tuple;
            continue;
        }
        const Key key = key_of(*tuple);
        auto [it, fresh] = slot.try_emplace(key, r.units.size());
        if (fresh) {
            r.units.push_back(TrafficUnit{kind, key, {}});
        }
        r.units[it->second].packets.push_back(p);
    }
    for (auto& u : r.units) {
        sort_by_time(u.packets);
    }
    return r;
}

}  // namespace

SplitResult split_packets(std::span<const ParsedPacket> capture) {
    SplitResult r;
    for (const auto& p : capture) {
        if (!p.layout.parsable()) {
            ++r.excluded_unparsable;
            continue;
        }
        r.units.push_back(TrafficUnit{UnitKind::Packet, PacketIndex{p.index}, {p}});
    }
    return r;
}

SplitResult split_flows(std::span<const ParsedPacket> capture) {
    return group_by<FiveTuple>(capture, UnitKind::Flow, [](const FiveTuple& t) { return t; });
}

SplitResult split_sessions(std::span<const ParsedPacket> capture) {
    return group_by<SessionKey>(capture, UnitKind::Session, &SessionKey::canonical);
}

SplitResult split(std::span<const ParsedPacket> capture, UnitKind kind) {
    switch (kind) {
    case UnitKind::Packet: return split_packets(capture);
    case UnitKind::Flow: return split_flows(capture);
    case UnitKind::Session: return split_sessions(capture);
    }
    return {};
}

void write_manifest(const std::filesystem::path& path, const SplitResult& result,
                    const IngestStats& stats, std::span<const std::string> header_lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write manifest: " + path.string());
    }
    for (const auto& h : header_lines) {
        out << "# " << h << '\n';
    }
    out << "# packets_total=" << stats.total << '\n'
        << "# packets_malformed=" << stats.malformed << '\n'
        << "# packets_unsupported_link=" << stats.unsupported_link << '\n'
        << "# excluded_unparsable=" << result.excluded_unparsable << '\n'
        << "# excluded_no_tuple=" << result.excluded_no_tuple << '\n'
        << "# units=" << result.units.size() << '\n'
        << "# kind, key, packet_count, byte_count\n";
    for (const auto& u : result.units) {
        out << to_string(u.kind) << ", " << key_to_string(u.key) << ", " << u.packets.size()
            << ", " << u.byte_count() << '\n';
    }
    if (!out) {
        throw Error(ErrorKind::Io, "write failed: " + path.string());
    }
}

}  // namespace rawbyte

std::size_t std::hash<rawbyte::SessionKey>::operator()(const rawbyte::SessionKey& k) const noexcept {
    rawbyte::FiveTuple t{k.a.ip, k.b.ip, k.a.port, k.b.port, k.proto};
    return std::hash<rawbyte::FiveTuple>{}(t);
}
