#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rawbyte/encoder.hpp"
#include "rawbyte/pcap.hpp"

namespace rawbyte {

using MacAddress = std::array<std::uint8_t, 6>;
using Ipv4 = std::array<std::uint8_t, 4>;

struct FrameFields {
    MacAddress dst_mac{0x02, 0, 0, 0, 0, 0x02};
    MacAddress src_mac{0x02, 0, 0, 0, 0, 0x01};
    Ipv4 src_ip{10, 0, 0, 1};
    Ipv4 dst_ip{10, 0, 0, 2};
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint16_t ip_id = 1;
    std::uint8_t ttl = 64;
    bool dont_fragment = false;
    // TCP only
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint8_t tcp_flags = 0x18;  // PSH|ACK
    std::uint16_t window = 8192;
};

std::uint16_t internet_checksum(std::span<const std::uint8_t> data, std::uint32_t initial = 0);

/// Ethernet/IPv4/UDP frame with valid IP and UDP checksums.
std::vector<std::uint8_t> build_udp_frame(const FrameFields& f, std::span<const std::uint8_t> payload);
/// Ethernet/IPv4/TCP frame (no options) with valid IP and TCP checksums.
std::vector<std::uint8_t> build_tcp_frame(const FrameFields& f, std::span<const std::uint8_t> payload);

enum class SynthTransport : std::uint8_t { Udp, Tcp, Mixed };

struct Signature {
    std::size_t payload_offset = 0;
    std::vector<std::uint8_t> pattern;
};

struct SynthClass {
    std::string name;
    Signature signature;
};

struct SynthSpec {
    std::vector<SynthClass> classes;
    std::size_t packets_per_class = 1000;
    std::size_t payload_min = 32;
    std::size_t payload_max = 256;
    std::size_t tuple_pool = 16;   // conversations per class
    double reply_fraction = 0.5;   // share of packets sent server -> client
    SynthTransport transport = SynthTransport::Mixed;
    std::uint64_t seed = 1;
};

/// `n` classes named class0.. with signatures at payload offset 0 that differ
/// in every byte (for up to 15 classes).
SynthSpec default_synth_spec(std::size_t n_classes, std::uint64_t seed = 1,
                             std::size_t signature_len = 8);

/// Throws SpecConflict when two classes' signatures agree at every payload
/// position they both fix, or a signature does not fit in payload_min bytes;
/// InvalidArgument for other unusable settings.
void validate(const SynthSpec& spec);

/// Time-ordered frames for one class. Class c uses client addresses 10.(16+c).x.y
/// and server 192.168.c.1.
std::vector<RawPacket> synth_class_packets(const SynthSpec& spec, std::size_t class_index);

/// All classes in one capture, class by class.
void generate_fixture(const SynthSpec& spec, const std::filesystem::path& path);

/// One capture per class, `<dir>/<name>.pcap`, returned as labelled scenarios.
std::vector<Scenario> generate_corpus(const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace rawbyte
