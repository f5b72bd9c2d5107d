#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rawbyte/layout.hpp"

namespace rawbyte {

enum class UnitKind : std::uint8_t { Packet, Flow, Session };

std::string_view to_string(UnitKind kind) noexcept;
std::optional<UnitKind> parse_unit_kind(std::string_view name) noexcept;

struct Endpoint {
    IpAddress ip;
    std::uint16_t port = 0;

    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

/// Direction-free identity of a conversation: the smaller endpoint comes first.
struct SessionKey {
    Endpoint a;
    Endpoint b;
    std::uint8_t proto = 0;

    static SessionKey canonical(const FiveTuple& t) noexcept;
    std::string to_string() const;

    friend auto operator<=>(const SessionKey&, const SessionKey&) = default;
};

struct PacketIndex {
    std::size_t value = 0;
    friend auto operator<=>(const PacketIndex&, const PacketIndex&) = default;
};

using UnitKey = std::variant<PacketIndex, FiveTuple, SessionKey>;

std::string key_to_string(const UnitKey& key);

struct TrafficUnit {
    UnitKind kind = UnitKind::Packet;
    UnitKey key;
    std::vector<ParsedPacket> packets;  // sorted by timestamp, then capture order

    std::size_t byte_count() const noexcept;
};

struct SplitResult {
    std::vector<TrafficUnit> units;
    std::size_t excluded_unparsable = 0;
    std::size_t excluded_no_tuple = 0;

    std::size_t excluded() const noexcept { return excluded_unparsable + excluded_no_tuple; }
};

SplitResult split_packets(std::span<const ParsedPacket> capture);
SplitResult split_flows(std::span<const ParsedPacket> capture);
SplitResult split_sessions(std::span<const ParsedPacket> capture);
SplitResult split(std::span<const ParsedPacket> capture, UnitKind kind);

/// One `kind, key, packet_count, byte_count` line per unit, preceded by
/// `#`-prefixed header lines for provenance and exclusion statistics.
void write_manifest(const std::filesystem::path& path, const SplitResult& result,
                    const IngestStats& stats, std::span<const std::string> header_lines = {});

}  // namespace rawbyte

template <>
struct std::hash<rawbyte::SessionKey> {
    std::size_t operator()(const rawbyte::SessionKey& k) const noexcept;
};
