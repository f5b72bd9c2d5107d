#include "rawbyte/layout.hpp"

#include <arpa/inet.h>

#include <cstring>

namespace rawbyte {

namespace {

constexpr std::size_t kEthHeaderLen = 14;
constexpr std::size_t kVlanTagLen = 4;
constexpr std::size_t kIpv6HeaderLen = 40;
constexpr std::size_t kUdpHeaderLen = 8;
constexpr std::size_t kIcmpHeaderLen = 8;

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86dd;

constexpr std::uint8_t kProtoIcmp = 1;
constexpr std::uint8_t kProtoTcp = 6;
constexpr std::uint8_t kProtoUdp = 17;
constexpr std::uint8_t kProtoIcmpv6 = 58;

bool is_vlan_tpid(std::uint16_t t) noexcept {
    return t == 0x8100 || t == 0x88a8 || t == 0x9100;
}

std::uint16_t be16(std::span<const std::uint8_t> b, std::size_t off) noexcept {
    return static_cast<std::uint16_t>(b[off] << 8 | b[off + 1]);
}

HeaderLayout malformed(HeaderLayout l) {
    l.status = LayoutStatus::Malformed;
    l.payload_off.reset();
    return l;
}

}  // namespace

HeaderLayout parse_layout(const RawPacket& pkt) {
    return parse_layout(pkt.data, pkt.link_type);
}

HeaderLayout parse_layout(std::span<const std::uint8_t> b, std::uint32_t link_type) {
    HeaderLayout l;
    if (link_type != kLinkTypeEthernet) {
        l.status = LayoutStatus::UnsupportedLink;
        return l;
    }
    const std::size_t n = b.size();
    if (n < kEthHeaderLen) {
        return malformed(l);
    }

    std::size_t eth_len = kEthHeaderLen;
    std::uint16_t type = be16(b, 12);
    while (is_vlan_tpid(type)) {
        if (eth_len + kVlanTagLen > n) {
            return malformed(l);
        }
        type = be16(b, eth_len + 2);
        eth_len += kVlanTagLen;
    }
    l.eth = Span{0, eth_len};
    l.ether_type = type;
    l.payload_off = eth_len;

    const std::size_t net_off = eth_len;
    std::size_t net_len = 0;
    std::uint8_t proto = 0;
    bool has_transport = true;

    if (type == kEtherIpv4) {
        if (net_off + 20 > n) {
            return malformed(l);
        }
        const std::uint8_t ver_ihl = b[net_off];
        const std::size_t ihl = ver_ihl & 0x0f;
        if ((ver_ihl >> 4) != 4 || ihl < 5 || net_off + ihl * 4 > n) {
            return malformed(l);
        }
        net_len = ihl * 4;
        proto = b[net_off + 9];
        // Later fragments carry no transport header.
        const std::uint16_t frag_off = be16(b, net_off + 6) & 0x1fff;
        has_transport = frag_off == 0;
    } else if (type == kEtherIpv6) {
        if (net_off + kIpv6HeaderLen > n || (b[net_off] >> 4) != 6) {
            return malformed(l);
        }
        net_len = kIpv6HeaderLen;
        proto = b[net_off + 6];
    } else {
        return l;  // ARP and friends: link layer only
    }

    l.net = Span{net_off, net_len};
    l.ip_proto = proto;
    l.payload_off = net_off + net_len;
    if (!has_transport) {
        return l;
    }

    const std::size_t t_off = net_off + net_len;
    std::size_t t_len = 0;
    switch (proto) {
    case kProtoTcp: {
        if (t_off + 20 > n) {
            return malformed(l);
        }
        const std::size_t doff = b[t_off + 12] >> 4;
        if (doff < 5 || t_off + doff * 4 > n) {
            return malformed(l);
        }
        t_len = doff * 4;
        break;
    }
    case kProtoUdp:
        t_len = kUdpHeaderLen;
        break;
    case kProtoIcmp:
    case kProtoIcmpv6:
        t_len = kIcmpHeaderLen;
        break;
    default:
        return l;
    }
    if (t_off + t_len > n) {
        return malformed(l);
    }
    l.trans = Span{t_off, t_len};
    l.payload_off = t_off + t_len;
    return l;
}

IpAddress IpAddress::v4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    IpAddress ip;
    ip.bytes[0] = a;
    ip.bytes[1] = b;
    ip.bytes[2] = c;
    ip.bytes[3] = d;
    return ip;
}

IpAddress IpAddress::from_v4(std::span<const std::uint8_t, 4> raw) {
    return v4(raw[0], raw[1], raw[2], raw[3]);
}

IpAddress IpAddress::from_v6(std::span<const std::uint8_t, 16> raw) {
    IpAddress ip;
    ip.family = Family::V6;
    std::memcpy(ip.bytes.data(), raw.data(), 16);
    return ip;
}

std::string IpAddress::to_string() const {
    char buf[INET6_ADDRSTRLEN] = {};
    if (family == Family::V4) {
        inet_ntop(AF_INET, bytes.data(), buf, sizeof buf);
    } else {
        inet_ntop(AF_INET6, bytes.data(), buf, sizeof buf);
    }
    return buf;
}

std::string FiveTuple::to_string() const {
    auto endpoint = [](const IpAddress& ip, std::uint16_t port) {
        if (ip.family == IpAddress::Family::V6) {
            return "[" + ip.to_string() + "]:" + std::to_string(port);
        }
        return ip.to_string() + ":" + std::to_string(port);
    };
    return endpoint(src_ip, src_port) + ">" + endpoint(dst_ip, dst_port) + "/" +
           std::to_string(proto);
}

std::optional<FiveTuple> five_tuple_of(const RawPacket& pkt, const HeaderLayout& layout) {
    if (!layout.parsable() || !layout.net) {
        return std::nullopt;
    }
    const auto b = std::span<const std::uint8_t>(pkt.data);
    const std::size_t off = layout.net->off;

    FiveTuple t;
    t.proto = layout.ip_proto;
    if (layout.ether_type == kEtherIpv4) {
        t.src_ip = IpAddress::from_v4(b.subspan(off + 12).first<4>());
        t.dst_ip = IpAddress::from_v4(b.subspan(off + 16).first<4>());
    } else {
        t.src_ip = IpAddress::from_v6(b.subspan(off + 8).first<16>());
        t.dst_ip = IpAddress::from_v6(b.subspan(off + 24).first<16>());
    }

    if (t.proto == kProtoTcp || t.proto == kProtoUdp) {
        if (!layout.trans) {
            return std::nullopt;
        }
        t.src_port = be16(b, layout.trans->off);
        t.dst_port = be16(b, layout.trans->off + 2);
    }
    return t;
}

Capture parse_capture(std::vector<RawPacket> packets) {
    Capture cap;
    cap.packets.reserve(packets.size());
    for (std::size_t i = 0; i < packets.size(); ++i) {
        ParsedPacket p;
        p.layout = parse_layout(packets[i]);
        p.raw = std::move(packets[i]);
        p.index = i;
        if (p.layout.status == LayoutStatus::Malformed) {
            ++cap.stats.malformed;
        } else if (p.layout.status == LayoutStatus::UnsupportedLink) {
            ++cap.stats.unsupported_link;
        }
        cap.packets.push_back(std::move(p));
    }
    cap.stats.total = cap.packets.size();
    return cap;
}

Capture load_capture(const std::filesystem::path& path) {
    return parse_capture(read_pcap(path));
}

}  // namespace rawbyte

std::size_t std::hash<rawbyte::IpAddress>::operator()(const rawbyte::IpAddress& ip) const noexcept {
    std::size_t h = static_cast<std::size_t>(ip.family);
    for (auto byte : ip.bytes) {
        h = h * 131 + byte;
    }
    return h;
}

std::size_t std::hash<rawbyte::FiveTuple>::operator()(const rawbyte::FiveTuple& t) const noexcept {
    std::hash<rawbyte::IpAddress> ih;
    std::size_t h = ih(t.src_ip);
    h ^= ih(t.dst_ip) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= (std::size_t(t.src_port) << 24 | std::size_t(t.dst_port) << 8 | t.proto) +
         0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}
