#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "rawbyte/error.hpp"
#include "rawbyte/pcap.hpp"
#include "test_util.hpp"

using namespace rawbyte;

namespace {

std::vector<RawPacket> random_packets(std::mt19937_64& rng, std::size_t n) {
    std::vector<RawPacket> out;
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<std::size_t> len(0, 200);
    for (std::size_t i = 0; i < n; ++i) {
        RawPacket p;
        p.ts_sec = 1'600'000'000u + static_cast<std::uint32_t>(i);
        p.ts_frac = static_cast<std::uint32_t>(i * 1000);
        p.data.resize(len(rng));
        for (auto& b : p.data) b = static_cast<std::uint8_t>(byte(rng));
        p.orig_len = static_cast<std::uint32_t>(p.data.size() + i % 3);
        out.push_back(std::move(p));
    }
    return out;
}

ErrorKind kind_of(const std::function<void()>& f, std::string* msg = nullptr) {
    try {
        f();
    } catch (const Error& e) {
        if (msg) *msg = e.what();
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(PcapReader, ReadsExternallyWrittenCapture) {
    const auto pkts = read_pcap(fixture("one_udp.pcap"));
    ASSERT_EQ(pkts.size(), 1u);
    const auto& p = pkts[0];
    EXPECT_EQ(p.ts_sec, 1600000000u);
    EXPECT_EQ(p.ts_frac, 250000u);
    EXPECT_EQ(p.orig_len, 60u);
    const std::vector<std::uint8_t> want = {
        0x02, 0x00, 0x00, 0x00, 0x00, 0x02, 0x02, 0x00, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x45,
        0x00, 0x00, 0x2e, 0x00, 0x01, 0x00, 0x00, 0x40, 0x11, 0x66, 0xbc, 0x0a, 0x00, 0x00, 0x01,
        0x0a, 0x00, 0x00, 0x02, 0x13, 0x88, 0x00, 0x35, 0x00, 0x1a, 0x44, 0x5e, 0x41, 0x42, 0x43,
        0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x4b, 0x4c, 0x4d, 0x4e, 0x4f, 0x50, 0x51, 0x52};
    EXPECT_EQ(p.data, want);
    PcapReader r(fixture("one_udp.pcap"));
    EXPECT_EQ(r.info().link_type, kLinkTypeEthernet);
    EXPECT_EQ(r.info().resolution, TimeResolution::Micro);
    EXPECT_EQ(r.info().byte_order, ByteOrder::Little);
}

TEST(PcapRoundTrip, EveryByteOrderAndResolution) {
    std::mt19937_64 rng(1);
    TempDir dir;
    for (auto order : {ByteOrder::Little, ByteOrder::Big}) {
        for (auto res : {TimeResolution::Micro, TimeResolution::Nano}) {
            auto pkts = random_packets(rng, 50);
            if (res == TimeResolution::Nano) {
                for (auto& p : pkts) p.ts_frac = p.ts_frac * 1000 + 7;
            }
            CaptureInfo info;
            info.byte_order = order;
            info.resolution = res;
            const auto path = dir / "rt.pcap";
            write_pcap(path, pkts, info);
            PcapReader r(path);
            EXPECT_EQ(r.info().byte_order, order);
            EXPECT_EQ(r.info().resolution, res);
            std::vector<RawPacket> back;
            while (auto p = r.next()) back.push_back(std::move(*p));
            EXPECT_EQ(back, pkts);
            EXPECT_EQ(r.packets_read(), pkts.size());
        }
    }
}

TEST(PcapRoundTrip, EmptyCapture) {
    TempDir dir;
    write_pcap(dir / "e.pcap", std::vector<RawPacket>{});
    EXPECT_TRUE(read_pcap(dir / "e.pcap").empty());
}

TEST(PcapReader, TruncatedTailAfterIntactPackets) {
    std::mt19937_64 rng(2);
    TempDir dir;
    auto pkts = random_packets(rng, 3);
    pkts[2].data.assign(40, 0x5a);
    write_pcap(dir / "t.pcap", pkts);
    auto bytes = read_bytes(dir / "t.pcap");
    bytes.resize(bytes.size() - 10);
    write_bytes(dir / "t.pcap", bytes);

    PcapReader r(dir / "t.pcap");
    EXPECT_EQ(*r.next(), pkts[0]);
    EXPECT_EQ(*r.next(), pkts[1]);
    EXPECT_EQ(kind_of([&] { r.next(); }), ErrorKind::TruncatedRecord);

    // a cut inside a record header is truncation too
    bytes.resize(24 + 16 + pkts[0].data.size() + 7);
    write_bytes(dir / "t.pcap", bytes);
    EXPECT_EQ(kind_of([&] { read_pcap(dir / "t.pcap"); }), ErrorKind::TruncatedRecord);
}

TEST(PcapReader, ImpossibleCapturedLengthIsTruncation) {
    TempDir dir;
    RawPacket p;
    p.data.assign(10, 1);
    write_pcap(dir / "big.pcap", std::vector<RawPacket>{p});
    auto bytes = read_bytes(dir / "big.pcap");
    bytes[24 + 8] = 0xff;  // caplen = 0xffff000a, little-endian
    bytes[24 + 9] = 0xff;
    bytes[24 + 10] = 0xff;
    write_bytes(dir / "big.pcap", bytes);
    EXPECT_EQ(kind_of([&] { read_pcap(dir / "big.pcap"); }), ErrorKind::TruncatedRecord);
}

TEST(PcapReader, RejectsPcapngAndUnknownMagic) {
    TempDir dir;
    std::vector<std::uint8_t> ng = {0x0a, 0x0d, 0x0d, 0x0a, 0x1c, 0, 0, 0, 0x4d, 0x3c, 0x2b, 0x1a};
    ng.resize(28, 0);
    write_bytes(dir / "x.pcapng", ng);
    std::string msg;
    EXPECT_EQ(kind_of([&] { PcapReader r(dir / "x.pcapng"); }, &msg), ErrorKind::UnknownMagic);
    EXPECT_NE(msg.find("pcapng"), std::string::npos);

    std::vector<std::uint8_t> junk(24, 0x33);
    write_bytes(dir / "junk.pcap", junk);
    EXPECT_EQ(kind_of([&] { PcapReader r(dir / "junk.pcap"); }), ErrorKind::UnknownMagic);

    write_bytes(dir / "short.pcap", {0xd4, 0xc3});
    EXPECT_NE(kind_of([&] { PcapReader r(dir / "short.pcap"); }), ErrorKind::InvalidArgument);
}

TEST(PcapReader, MissingFileNamesThePath) {
    std::string msg;
    EXPECT_EQ(kind_of([&] { PcapReader r("/nonexistent/capture.pcap"); }, &msg), ErrorKind::Io);
    EXPECT_NE(msg.find("/nonexistent/capture.pcap"), std::string::npos);
}

TEST(PcapReader, NormalisesOverflowingFraction) {
    TempDir dir;
    RawPacket p;
    p.ts_sec = 10;
    p.ts_frac = 0;
    p.data = {1, 2, 3};
    write_pcap(dir / "f.pcap", std::vector<RawPacket>{p});
    auto bytes = read_bytes(dir / "f.pcap");
    const std::uint32_t frac = 2'500'000;  // 2.5 s in microseconds
    for (int i = 0; i < 4; ++i) bytes[24 + 4 + i] = static_cast<std::uint8_t>(frac >> (8 * i));
    write_bytes(dir / "f.pcap", bytes);
    const auto back = read_pcap(dir / "f.pcap");
    EXPECT_EQ(back[0].ts_sec, 12u);
    EXPECT_EQ(back[0].ts_frac, 500000u);
}

// Random truncation and header corruption: either packets or a typed error,
// and truncation alone only ever drops a suffix.
TEST(PcapFuzz, TruncationAndCorruptionNeverCrash) {
    std::mt19937_64 rng(3);
    TempDir dir;
    const auto pkts = random_packets(rng, 20);
    write_pcap(dir / "src.pcap", pkts);
    const auto good = read_bytes(dir / "src.pcap");
    std::uniform_int_distribution<std::size_t> cut(0, good.size());
    std::uniform_int_distribution<int> byte(0, 255);
    for (int t = 0; t < 300; ++t) {
        auto b = good;
        const bool corrupt = t % 2 == 1;
        if (corrupt) {
            for (int k = 0; k < 3; ++k) b[24 + cut(rng) % (b.size() - 24)] = static_cast<std::uint8_t>(byte(rng));
        } else {
            b.resize(cut(rng));
        }
        write_bytes(dir / "fz.pcap", b);
        std::vector<RawPacket> got;
        try {
            PcapReader r(dir / "fz.pcap");
            while (auto p = r.next()) got.push_back(std::move(*p));
        } catch (const Error& e) {
            EXPECT_TRUE(e.kind() == ErrorKind::TruncatedRecord || e.kind() == ErrorKind::UnknownMagic ||
                        e.kind() == ErrorKind::Io)
                << to_string(e.kind());
        }
        if (!corrupt) {
            ASSERT_LE(got.size(), pkts.size());
            for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], pkts[i]);
        }
    }
}
