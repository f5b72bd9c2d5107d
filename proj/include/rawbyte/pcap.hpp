#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

namespace rawbyte {

inline constexpr std::uint32_t kPcapMagicMicro = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;
inline constexpr std::uint32_t kPcapngMagic = 0x0a0d0d0a;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;

enum class TimeResolution : std::uint8_t { Micro, Nano };

enum class ByteOrder : std::uint8_t { Little, Big };

/// One captured frame. `data` holds exactly the record's captured-length bytes.
struct RawPacket {
    std::uint32_t ts_sec = 0;
    std::uint32_t ts_frac = 0;  // micro- or nanoseconds, per the capture header
    std::uint32_t orig_len = 0;
    std::uint32_t link_type = kLinkTypeEthernet;
    std::vector<std::uint8_t> data;

    friend bool operator==(const RawPacket&, const RawPacket&) = default;
};

struct CaptureInfo {
    TimeResolution resolution = TimeResolution::Micro;
    ByteOrder byte_order = ByteOrder::Little;
    std::uint32_t link_type = kLinkTypeEthernet;
    std::uint32_t snaplen = 0;
    std::uint16_t version_major = 2;
    std::uint16_t version_minor = 4;
};

/**
 * Streaming reader for classic pcap files.
 *
 * Only the current record is held in memory. A damaged record tail makes
 * next() throw TruncatedRecord after every intact packet before it has been
 * returned; pcapng input is rejected at construction with UnknownMagic.
 */
class PcapReader {
public:
    explicit PcapReader(const std::filesystem::path& path);

    const CaptureInfo& info() const noexcept { return info_; }

    /// Next packet in file order, or nullopt at a clean end of file.
    std::optional<RawPacket> next();

    std::uint64_t packets_read() const noexcept { return count_; }

private:
    std::uint32_t decode32(const std::uint8_t* p) const noexcept;

    std::filesystem::path path_;
    std::ifstream in_;
    CaptureInfo info_;
    std::uint64_t count_ = 0;
    std::uint64_t offset_ = 0;
    std::optional<std::uint64_t> file_size_;  // unset for pipes
};

/// Whole-file convenience over PcapReader; errors propagate as thrown.
std::vector<RawPacket> read_pcap(const std::filesystem::path& path);

/// Writes classic pcap in the requested byte order and time resolution.
class PcapWriter {
public:
    PcapWriter(const std::filesystem::path& path, CaptureInfo info = {});

    void write(const RawPacket& pkt);
    void flush();

private:
    void put32(std::uint32_t v);
    void put16(std::uint16_t v);

    std::filesystem::path path_;
    std::ofstream out_;
    CaptureInfo info_;
};

void write_pcap(const std::filesystem::path& path, std::span<const RawPacket> packets,
                CaptureInfo info = {});

}  // namespace rawbyte
