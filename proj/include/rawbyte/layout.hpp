#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rawbyte/pcap.hpp"

namespace rawbyte {

struct Span {
    std::size_t off = 0;
    std::size_t len = 0;

    std::size_t end() const noexcept { return off + len; }
    friend bool operator==(const Span&, const Span&) = default;
};

enum class LayoutStatus : std::uint8_t {
    Ok,
    Malformed,        // a header field or span is impossible for the captured bytes
    UnsupportedLink,  // capture link type is not Ethernet
};

/// Byte spans of the link, network and transport headers. Present layers are
/// contiguous from offset 0; layers past the last parsable boundary are unset.
struct HeaderLayout {
    LayoutStatus status = LayoutStatus::Ok;
    std::optional<Span> eth;
    std::optional<Span> net;
    std::optional<Span> trans;
    std::optional<std::size_t> payload_off;
    std::uint16_t ether_type = 0;  // innermost, after VLAN tags
    std::uint8_t ip_proto = 0;     // valid when net is set

    bool parsable() const noexcept { return status == LayoutStatus::Ok; }

    friend bool operator==(const HeaderLayout&, const HeaderLayout&) = default;
};

HeaderLayout parse_layout(const RawPacket& pkt);
HeaderLayout parse_layout(std::span<const std::uint8_t> bytes, std::uint32_t link_type);

struct IpAddress {
    enum class Family : std::uint8_t { V4, V6 };

    Family family = Family::V4;
    std::array<std::uint8_t, 16> bytes{};  // v4 uses the first four

    static IpAddress v4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d);
    static IpAddress from_v4(std::span<const std::uint8_t, 4> raw);
    static IpAddress from_v6(std::span<const std::uint8_t, 16> raw);

    std::string to_string() const;

    friend auto operator<=>(const IpAddress&, const IpAddress&) = default;
};

struct FiveTuple {
    IpAddress src_ip;
    IpAddress dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t proto = 0;

    FiveTuple reversed() const noexcept {
        return {dst_ip, src_ip, dst_port, src_port, proto};
    }
    std::string to_string() const;

    friend auto operator<=>(const FiveTuple&, const FiveTuple&) = default;
};

/// None when there is no network layer, or when a TCP/UDP datagram carries no
/// transport header (non-first IP fragments), so ports would be unknown.
std::optional<FiveTuple> five_tuple_of(const RawPacket& pkt, const HeaderLayout& layout);

/// A packet with its parsed layout and its position in the source capture.
struct ParsedPacket {
    RawPacket raw;
    HeaderLayout layout;
    std::size_t index = 0;
};

struct IngestStats {
    std::size_t total = 0;
    std::size_t malformed = 0;
    std::size_t unsupported_link = 0;

    std::size_t unparsable() const noexcept { return malformed + unsupported_link; }
};

struct Capture {
    std::vector<ParsedPacket> packets;
    IngestStats stats;
};

Capture parse_capture(std::vector<RawPacket> packets);
Capture load_capture(const std::filesystem::path& path);

}  // namespace rawbyte

template <>
struct std::hash<rawbyte::IpAddress> {
    std::size_t operator()(const rawbyte::IpAddress& ip) const noexcept;
};

template <>
struct std::hash<rawbyte::FiveTuple> {
    std::size_t operator()(const rawbyte::FiveTuple& t) const noexcept;
};
