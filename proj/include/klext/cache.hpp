#pragma once

// Versioned binary cache files for group slices and KL tables.
//
// Layout (little-endian): 8-byte magic, u32 format version, u8 type letter,
// u32 rank, u8 affine flag, u32 length cutoff, u64 element count, payload,
// then a u64 FNV-1a checksum of every preceding byte. Files are written to a
// temporary name and renamed into place, never patched.

#include "klext/klpoly.hpp"
#include "klext/weylaffine.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace klext {

inline constexpr std::uint32_t kCacheFormatVersion = 1;

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 14695981039346656037ull);

std::string slice_file_name(const RootSystem& rs, bool affine, std::uint32_t cutoff);
std::string table_file_name(const RootSystem& rs, bool affine, std::uint32_t cutoff);

void save_slice(const GroupSlice& slice, const std::filesystem::path& path);
// Loads a slice stored with cutoff >= the requested one and keeps the elements
// of length <= cutoff. Throws CacheError on any corruption or mismatch.
std::shared_ptr<const GroupSlice> load_slice(const std::filesystem::path& path,
                                             std::shared_ptr<const AffineWeylGroup> group, bool affine,
                                             std::uint32_t cutoff);

void save_table(const KLTable& table, const std::filesystem::path& path);
// Loads the rows of a table whose slice contains the given one (same system,
// cutoff >= slice.cutoff()).
KLTable load_table(const std::filesystem::path& path, std::shared_ptr<const GroupSlice> slice);

// Cache directory lookup: the smallest stored cutoff >= the requested one.
std::optional<std::filesystem::path> find_cached(const std::filesystem::path& dir, const std::string& prefix,
                                                 std::uint32_t cutoff);

}  // namespace klext
