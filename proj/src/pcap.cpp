#include "rawbyte/pcap.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <system_error>

#include "rawbyte/error.hpp"

namespace rawbyte {

namespace {

constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;

std::uint32_t load_le32(const std::uint8_t* p) noexcept {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

std::uint32_t byteswap32(std::uint32_t v) noexcept {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

std::uint32_t frac_units(TimeResolution r) noexcept {
    return r == TimeResolution::Nano ? 1'000'000'000u : 1'000'000u;
}

}  // namespace

PcapReader::PcapReader(const std::filesystem::path& path) : path_(path) {
    in_.open(path, std::ios::binary);
    if (!in_) {
        throw Error(ErrorKind::Io, "cannot open capture file: " + path.string());
    }

    std::array<std::uint8_t, kGlobalHeaderLen> hdr{};
    in_.read(reinterpret_cast<char*>(hdr.data()), 4);
    if (in_.gcount() < 4) {
        throw Error(ErrorKind::UnknownMagic,
                    path.string() + ": file too short to hold a pcap magic number");
    }
    const std::uint32_t magic = load_le32(hdr.data());
    switch (magic) {
    case kPcapMagicMicro:
        info_.byte_order = ByteOrder::Little;
        info_.resolution = TimeResolution::Micro;
        break;
    case kPcapMagicNano:
        info_.byte_order = ByteOrder::Little;
        info_.resolution = TimeResolution::Nano;
        break;
    case 0xd4c3b2a1:
        info_.byte_order = ByteOrder::Big;
        info_.resolution = TimeResolution::Micro;
        break;
    case 0x4d3cb2a1:
        info_.byte_order = ByteOrder::Big;
        info_.resolution = TimeResolution::Nano;
        break;
    case kPcapngMagic:
        throw Error(ErrorKind::UnknownMagic,
                    path.string() + ": pcapng format is not supported, convert to classic pcap");
    default: {
        char buf[16];
        std::snprintf(buf, sizeof buf, "0x%08x", magic);
        throw Error(ErrorKind::UnknownMagic,
                    path.string() + ": not a classic pcap file (magic " + buf + ")");
    }
    }

    in_.read(reinterpret_cast<char*>(hdr.data() + 4), kGlobalHeaderLen - 4);
    if (in_.gcount() < static_cast<std::streamsize>(kGlobalHeaderLen - 4)) {
        throw Error(ErrorKind::TruncatedRecord, path.string() + ": truncated pcap global header");
    }
    if (info_.byte_order == ByteOrder::Little) {
        info_.version_major = static_cast<std::uint16_t>(hdr[4] | hdr[5] << 8);
        info_.version_minor = static_cast<std::uint16_t>(hdr[6] | hdr[7] << 8);
    } else {
        info_.version_major = static_cast<std::uint16_t>(hdr[4] << 8 | hdr[5]);
        info_.version_minor = static_cast<std::uint16_t>(hdr[6] << 8 | hdr[7]);
    }
    info_.snaplen = decode32(hdr.data() + 16);
    info_.link_type = decode32(hdr.data() + 20);
    offset_ = kGlobalHeaderLen;

    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) {
        const auto size = std::filesystem::file_size(path, ec);
        if (!ec) {
            file_size_ = size;
        }
    }
}

std::uint32_t PcapReader::decode32(const std::uint8_t* p) const noexcept {
    const std::uint32_t v = load_le32(p);
    return info_.byte_order == ByteOrder::Little ? v : byteswap32(v);
}

std::optional<RawPacket> PcapReader::next() {
    std::array<std::uint8_t, kRecordHeaderLen> rec{};
    in_.read(reinterpret_cast<char*>(rec.data()), kRecordHeaderLen);
    const auto got = in_.gcount();
    if (got == 0) {
        return std::nullopt;
    }
    if (got < static_cast<std::streamsize>(kRecordHeaderLen)) {
        throw Error(ErrorKind::TruncatedRecord,
                    path_.string() + ": record header cut short after packet " +
                        std::to_string(count_) + " (offset " + std::to_string(offset_) + ")");
    }
    offset_ += kRecordHeaderLen;

    RawPacket pkt;
    pkt.ts_sec = decode32(rec.data());
    pkt.ts_frac = decode32(rec.data() + 4);
    const std::uint32_t caplen = decode32(rec.data() + 8);
    pkt.orig_len = decode32(rec.data() + 12);
    pkt.link_type = info_.link_type;

    const std::uint32_t units = frac_units(info_.resolution);
    if (pkt.ts_frac >= units) {
        pkt.ts_sec += pkt.ts_frac / units;
        pkt.ts_frac %= units;
    }

    // Reject impossible lengths before allocating for them.
    if (file_size_ && caplen > *file_size_ - std::min(offset_, *file_size_)) {
        throw Error(ErrorKind::TruncatedRecord,
                    path_.string() + ": record " + std::to_string(count_ + 1) + " claims " +
                        std::to_string(caplen) + " captured bytes but only " +
                        std::to_string(*file_size_ - std::min(offset_, *file_size_)) + " remain");
    }

    pkt.data.resize(caplen);
    in_.read(reinterpret_cast<char*>(pkt.data.data()), caplen);
    if (in_.gcount() < static_cast<std::streamsize>(caplen)) {
        throw Error(ErrorKind::TruncatedRecord,
                    path_.string() + ": record " + std::to_string(count_ + 1) +
                        " data cut short");
    }
    offset_ += caplen;
    ++count_;
    return pkt;
}

std::vector<RawPacket> read_pcap(const std::filesystem::path& path) {
    PcapReader reader(path);
    std::vector<RawPacket> out;
    while (auto pkt = reader.next()) {
        out.push_back(std::move(*pkt));
    }
    return out;
}

PcapWriter::PcapWriter(const std::filesystem::path& path, CaptureInfo info)
    : path_(path), info_(info) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) {
        throw Error(ErrorKind::Io, "cannot create capture file: " + path.string());
    }
    put32(info_.resolution == TimeResolution::Nano ? kPcapMagicNano : kPcapMagicMicro);
    put16(info_.version_major);
    put16(info_.version_minor);
    put32(0);  // thiszone
    put32(0);  // sigfigs
    put32(info_.snaplen == 0 ? 262144 : info_.snaplen);
    put32(info_.link_type);
}

void PcapWriter::put32(std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) {
        const int shift = info_.byte_order == ByteOrder::Little ? 8 * i : 8 * (3 - i);
        b[i] = static_cast<char>((v >> shift) & 0xff);
    }
    out_.write(b.data(), 4);
}

void PcapWriter::put16(std::uint16_t v) {
    std::array<char, 2> b{};
    if (info_.byte_order == ByteOrder::Little) {
        b = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    } else {
        b = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    }
    out_.write(b.data(), 2);
}

void PcapWriter::write(const RawPacket& pkt) {
    put32(pkt.ts_sec);
    put32(pkt.ts_frac);
    put32(static_cast<std::uint32_t>(pkt.data.size()));
    put32(pkt.orig_len);
    out_.write(reinterpret_cast<const char*>(pkt.data.data()),
               static_cast<std::streamsize>(pkt.data.size()));
    if (!out_) {
        throw Error(ErrorKind::Io, "write failed: " + path_.string());
    }
}

void PcapWriter::flush() {
    out_.flush();
    if (!out_) {
        throw Error(ErrorKind::Io, "flush failed: " + path_.string());
    }
}

void write_pcap(const std::filesystem::path& path, std::span<const RawPacket> packets,
                CaptureInfo info) {
    PcapWriter w(path, info);
    for (const auto& p : packets) {
        w.write(p);
    }
    w.flush();
}

}  // namespace rawbyte
