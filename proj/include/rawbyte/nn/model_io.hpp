#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rawbyte/nn/network.hpp"

namespace rawbyte::nn {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// A trained network plus what is needed to interpret its outputs.
struct ModelFile {
    Network network;
    std::vector<std::string> classes;
    std::map<std::string, std::string> meta;  // config_hash, seed, ...
};

/**
 * Binary layout, little-endian:
 *   "RBYTECNN" | u32 version | config | class names | meta pairs |
 *   u64 param count | f64 params in layout order | u32 CRC-32 of all preceding bytes
 * Strings are u32 length + bytes.
 */
void save_model(const std::filesystem::path& path, const ModelFile& model);

/// Throws CorruptModelFile on a bad magic, unknown version, short file or
/// checksum mismatch.
ModelFile load_model(const std::filesystem::path& path);

}  // namespace rawbyte::nn
