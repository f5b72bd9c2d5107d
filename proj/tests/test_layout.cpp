#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rawbyte/layout.hpp"
#include "test_util.hpp"

using namespace rawbyte;

namespace {

RawPacket as_packet(const oracle::Built& b, std::uint32_t link = kLinkTypeEthernet) {
    RawPacket p;
    p.data = b.bytes;
    p.orig_len = static_cast<std::uint32_t>(b.bytes.size());
    p.link_type = link;
    return p;
}

void expect_tuple(const std::optional<FiveTuple>& got, const oracle::Tuple& want) {
    ASSERT_TRUE(got.has_value());
    const std::size_t n = want.family == 4 ? 4 : 16;
    EXPECT_EQ(got->src_ip.family == IpAddress::Family::V4 ? 4 : 6, want.family);
    EXPECT_TRUE(std::equal(want.src.begin(), want.src.begin() + n, got->src_ip.bytes.begin()));
    EXPECT_TRUE(std::equal(want.dst.begin(), want.dst.begin() + n, got->dst_ip.bytes.begin()));
    EXPECT_EQ(got->src_port, want.sport);
    EXPECT_EQ(got->dst_port, want.dport);
    EXPECT_EQ(got->proto, want.proto);
}

}  // namespace

TEST(Layout, Ipv4OffsetsMatchHeaderFields) {
    int checked = 0;
    for (int vlan = 0; vlan <= 2; ++vlan) {
        for (std::size_t ipopt : {0u, 1u, 3u, 10u}) {
            for (std::uint8_t proto : {6, 17, 1}) {
                for (std::size_t tcpopt : {0u, 3u, 10u}) {
                    if (proto != 6 && tcpopt) continue;
                    for (std::size_t payload : {0u, 1u, 37u}) {
                        oracle::FrameSpec s;
                        s.vlan_tags = vlan;
                        s.ip_option_words = ipopt;
                        s.proto = proto;
                        s.tcp_option_words = tcpopt;
                        s.payload = payload;
                        const auto b = oracle::ipv4_frame(s);
                        const auto pkt = as_packet(b);
                        const auto l = parse_layout(pkt);
                        ASSERT_EQ(l.status, LayoutStatus::Ok);
                        EXPECT_EQ(l.eth, (Span{0, b.eth_len}));
                        EXPECT_EQ(l.net, (Span{b.eth_len, b.net_len}));
                        EXPECT_EQ(l.trans, (Span{b.eth_len + b.net_len, b.trans_len}));
                        EXPECT_EQ(l.payload_off, b.eth_len + b.net_len + b.trans_len);
                        EXPECT_EQ(l.ether_type, 0x0800);
                        EXPECT_EQ(l.ip_proto, proto);
                        expect_tuple(five_tuple_of(pkt, l), *b.tuple);
                        ++checked;
                    }
                }
            }
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Layout, Ipv6UdpAndArp) {
    const auto v6 = oracle::ipv6_udp_frame(20);
    const auto pkt6 = as_packet(v6);
    const auto l6 = parse_layout(pkt6);
    ASSERT_TRUE(l6.parsable());
    EXPECT_EQ(l6.net, (Span{14, 40}));
    EXPECT_EQ(l6.trans, (Span{54, 8}));
    expect_tuple(five_tuple_of(pkt6, l6), *v6.tuple);

    const auto arp = as_packet(oracle::arp_frame());
    const auto la = parse_layout(arp);
    EXPECT_TRUE(la.parsable());
    EXPECT_EQ(la.eth, (Span{0, 14}));
    EXPECT_FALSE(la.net.has_value());
    EXPECT_FALSE(la.trans.has_value());
    EXPECT_FALSE(five_tuple_of(arp, la).has_value());
}

TEST(Layout, MalformedHeadersAreTaggedNotDropped) {
    oracle::FrameSpec s;
    auto bad_ihl = oracle::ipv4_frame(s);
    bad_ihl.bytes[14] = 0x44;
    auto bad_version = oracle::ipv4_frame(s);
    bad_version.bytes[14] = 0x65;
    s.proto = 6;
    auto bad_doff = oracle::ipv4_frame(s);
    bad_doff.bytes[14 + 20 + 12] = 0x40;
    auto short_tcp = oracle::ipv4_frame(s);
    short_tcp.bytes.resize(14 + 20 + 10);
    auto short_eth = oracle::ipv4_frame(s);
    short_eth.bytes.resize(9);
    s.ip_option_words = 10;
    auto short_ip = oracle::ipv4_frame(s);
    short_ip.bytes.resize(14 + 30);

    std::vector<RawPacket> pkts;
    for (const auto* b : {&bad_ihl, &bad_version, &bad_doff, &short_tcp, &short_eth, &short_ip}) {
        const auto p = as_packet(*b);
        EXPECT_EQ(parse_layout(p).status, LayoutStatus::Malformed);
        pkts.push_back(p);
    }
    pkts.push_back(as_packet(oracle::ipv4_frame({})));
    pkts.push_back(as_packet(oracle::ipv4_frame({}), 101));  // raw IP link type
    const auto cap = parse_capture(pkts);
    EXPECT_EQ(cap.packets.size(), pkts.size());
    EXPECT_EQ(cap.stats.total, 8u);
    EXPECT_EQ(cap.stats.malformed, 6u);
    EXPECT_EQ(cap.stats.unsupported_link, 1u);
    EXPECT_EQ(cap.packets[7].layout.status, LayoutStatus::UnsupportedLink);
    for (std::size_t i = 0; i < cap.packets.size(); ++i) EXPECT_EQ(cap.packets[i].index, i);
}

TEST(Layout, NonFirstFragmentHasNoTransport) {
    oracle::FrameSpec s;
    auto b = oracle::ipv4_frame(s);
    b.bytes[14 + 6] = 0x00;
    b.bytes[14 + 7] = 0x10;  // fragment offset 16 * 8 bytes
    const auto pkt = as_packet(b);
    const auto l = parse_layout(pkt);
    ASSERT_TRUE(l.parsable());
    EXPECT_EQ(l.net, (Span{14, 20}));
    EXPECT_FALSE(l.trans.has_value());
    EXPECT_EQ(l.payload_off, 34u);
    EXPECT_FALSE(five_tuple_of(pkt, l).has_value());
}

TEST(Layout, ExternallyWrittenFixture) {
    const auto cap = load_capture(fixture("benign.pcap"));
    ASSERT_EQ(cap.packets.size(), 5u);
    EXPECT_EQ(cap.stats.unparsable(), 0u);
    const auto& opt_ip = cap.packets[3].layout;  // IHL 6
    EXPECT_EQ(opt_ip.net, (Span{14, 24}));
    EXPECT_EQ(opt_ip.trans, (Span{38, 8}));
    const auto& opt_tcp = cap.packets[4].layout;  // data offset 8
    EXPECT_EQ(opt_tcp.trans, (Span{34, 32}));
    EXPECT_EQ(opt_tcp.payload_off, 66u);

    const auto t = five_tuple_of(cap.packets[0].raw, cap.packets[0].layout);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->to_string(), "192.168.1.10:40000>192.168.1.20:80/6");
    const auto r = five_tuple_of(cap.packets[1].raw, cap.packets[1].layout);
    EXPECT_EQ(*r, t->reversed());
}

TEST(Layout, ScapyUdpFixtureOffsets) {
    const auto cap = load_capture(fixture("one_udp.pcap"));
    const auto& l = cap.packets.at(0).layout;
    EXPECT_EQ(l.eth, (Span{0, 14}));
    EXPECT_EQ(l.net, (Span{14, 20}));
    EXPECT_EQ(l.trans, (Span{34, 8}));
    EXPECT_EQ(l.payload_off, 42u);
    const auto t = five_tuple_of(cap.packets[0].raw, l);
    EXPECT_EQ(t->to_string(), "10.0.0.1:5000>10.0.0.2:53/17");
}

TEST(Layout, RandomBytesNeverCrash) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<std::size_t> len(0, 120);
    for (int t = 0; t < 5000; ++t) {
        std::vector<std::uint8_t> b(len(rng));
        for (auto& x : b) x = static_cast<std::uint8_t>(byte(rng));
        if (b.size() > 13 && t % 2) {
            b[12] = 0x08;
            b[13] = 0x00;
            if (b.size() > 14) b[14] = static_cast<std::uint8_t>(0x40 | (b[14] & 0x0f));
        }
        const auto l = parse_layout(b, kLinkTypeEthernet);
        for (const auto& s : {l.eth, l.net, l.trans}) {
            if (s) EXPECT_LE(s->end(), b.size());
        }
        if (l.payload_off) EXPECT_LE(*l.payload_off, b.size());
    }
}
