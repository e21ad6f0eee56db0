#pragma once

#include <filesystem>
#include <span>

#include "gqads/bits.hpp"
#include "gqads/core_types.hpp"

namespace gqads {

// Binary key image: "GQADSKEY", u32 n, u32 r (little-endian), then the n*r
// key bits MSB-first, zero-padded to a byte boundary. The text form is the
// same image as base16, whitespace ignored.
Bytes encode_key(const Key& key);
std::string encode_key_hex(const Key& key);
/// Accepts either the binary image or its hex text form.
Key decode_key(std::span<const std::uint8_t> data);

void write_key_file(const std::filesystem::path& path, const Key& key, bool hex = false);
Key read_key_file(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace gqads
