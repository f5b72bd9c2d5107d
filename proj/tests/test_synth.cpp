#include <gtest/gtest.h>

#include <functional>

#include "rawbyte/error.hpp"
#include "rawbyte/layout.hpp"
#include "rawbyte/pcap.hpp"
#include "rawbyte/synth.hpp"
#include "test_util.hpp"

using namespace rawbyte;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

// Ones'-complement sum over the IPv4 header; 0 means the checksum is right.
std::uint16_t fold(const std::vector<std::uint8_t>& b, std::size_t from, std::size_t to, std::uint32_t sum = 0) {
    for (std::size_t i = from; i < to; i += 2) {
        sum += static_cast<std::uint32_t>(b[i]) << 8 | (i + 1 < to ? b[i + 1] : 0);
    }
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum);
}

}  // namespace

TEST(Synth, UdpFrameMatchesExternallyBuiltFixture) {
    FrameFields f;
    f.src_port = 5000;
    f.dst_port = 53;
    std::vector<std::uint8_t> payload;
    for (std::uint8_t c = 0x41; c <= 0x52; ++c) payload.push_back(c);
    const auto frame = build_udp_frame(f, payload);
    EXPECT_EQ(frame, read_pcap(fixture("one_udp.pcap"))[0].data);
}

TEST(Synth, TcpChecksumsVerify) {
    FrameFields f;
    f.src_port = 40000;
    f.dst_port = 443;
    f.seq = 123456;
    const std::vector<std::uint8_t> payload(33, 0x7e);  // odd length exercises the pad byte
    const auto b = build_tcp_frame(f, payload);
    ASSERT_EQ(b.size(), 14u + 20 + 20 + 33);
    EXPECT_EQ(fold(b, 14, 34), 0);
    const std::uint32_t tcp_len = static_cast<std::uint32_t>(b.size() - 34);
    std::uint32_t pseudo = 0;
    for (std::size_t i = 26; i < 34; i += 2) pseudo += static_cast<std::uint32_t>(b[i]) << 8 | b[i + 1];
    pseudo += 6 + tcp_len;
    EXPECT_EQ(fold(b, 34, b.size(), pseudo), 0);
}

TEST(Synth, CountsAndDeterminism) {
    TempDir dir;
    const auto spec = default_synth_spec(2, 7);
    generate_fixture(spec, dir / "a.pcap");
    generate_fixture(spec, dir / "b.pcap");
    EXPECT_EQ(read_pcap(dir / "a.pcap").size(), 2000u);
    EXPECT_EQ(read_bytes(dir / "a.pcap"), read_bytes(dir / "b.pcap"));
    auto other = spec;
    other.seed = 8;
    generate_fixture(other, dir / "c.pcap");
    EXPECT_NE(read_bytes(dir / "a.pcap"), read_bytes(dir / "c.pcap"));

    const auto scen = generate_corpus(spec, dir.path());
    ASSERT_EQ(scen.size(), 2u);
    EXPECT_EQ(scen[1].label, "class1");
    EXPECT_EQ(read_pcap(scen[1].path).size(), 1000u);
}

TEST(Synth, SignatureAtPayloadOffset) {
    auto spec = default_synth_spec(3, 2);
    spec.packets_per_class = 300;
    for (std::size_t c = 0; c < 3; ++c) spec.classes[c].signature.payload_offset = 10;
    spec.payload_min = 40;
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& sig = spec.classes[c].signature.pattern;
        bool saw_tcp = false, saw_udp = false;
        for (const auto& p : synth_class_packets(spec, c)) {
            const auto& d = p.data;
            // header lengths read from the frame itself
            const std::size_t ip = 14 + (d[14] & 0x0f) * 4u;
            const std::size_t trans = d[23] == 6 ? (d[ip + 12] >> 4) * 4u : 8u;
            saw_tcp |= d[23] == 6;
            saw_udp |= d[23] == 17;
            const std::size_t at = ip + trans + 10;
            ASSERT_LE(at + sig.size(), d.size());
            EXPECT_TRUE(std::equal(sig.begin(), sig.end(), d.begin() + static_cast<std::ptrdiff_t>(at)));
            EXPECT_EQ(fold(d, 14, ip), 0);
        }
        EXPECT_TRUE(saw_tcp && saw_udp);
    }
}

TEST(Synth, PacketsAreTimeOrderedAndParse) {
    const auto spec = default_synth_spec(2);
    for (std::size_t c = 0; c < 2; ++c) {
        const auto pkts = synth_class_packets(spec, c);
        const auto cap = parse_capture(pkts);
        EXPECT_EQ(cap.stats.malformed, 0u);
        for (std::size_t i = 1; i < pkts.size(); ++i) {
            EXPECT_LE(std::make_pair(pkts[i - 1].ts_sec, pkts[i - 1].ts_frac),
                      std::make_pair(pkts[i].ts_sec, pkts[i].ts_frac));
        }
    }
}

TEST(Synth, ConflictingSpecsAreRejected) {
    auto spec = default_synth_spec(2);
    spec.classes[1].signature = spec.classes[0].signature;
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::SpecConflict);

    spec = default_synth_spec(2);
    spec.classes[0].signature.payload_offset = 30;  // 30 + 8 > payload_min
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::SpecConflict);

    spec = default_synth_spec(2);
    spec.classes[0].signature.pattern.clear();
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::SpecConflict);

    // a shorter signature that is a prefix of another agrees on every shared byte
    spec = default_synth_spec(2);
    spec.classes[1].signature.pattern = {spec.classes[0].signature.pattern[0]};
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::SpecConflict);

    spec = default_synth_spec(2);
    spec.payload_max = 10;
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::InvalidArgument);
    EXPECT_NO_THROW(validate(default_synth_spec(15)));
}
