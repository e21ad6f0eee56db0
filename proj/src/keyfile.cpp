#include "gqads/keyfile.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

namespace gqads {

namespace {

constexpr char kMagic[8] = {'G', 'Q', 'A', 'D', 'S', 'K', 'E', 'Y'};

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | in[static_cast<std::size_t>(i)];
  return v;
}

bool has_magic(std::span<const std::uint8_t> data) {
  return data.size() >= 8 && std::memcmp(data.data(), kMagic, 8) == 0;
}

}  // namespace

Bytes encode_key(const Key& key) {
  Bytes out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, key.n());
  put_u32(out, key.r());
  const auto& body = key.bits().bytes();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::string encode_key_hex(const Key& key) { return to_hex(encode_key(key)) + "\n"; }

Key decode_key(std::span<const std::uint8_t> data) {
  Bytes storage;
  if (!has_magic(data)) {
    storage = from_hex(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
    data = storage;
    if (!has_magic(data)) throw Error(ErrorCode::ParseError, "missing GQADSKEY magic");
  }
  if (data.size() < 16) throw Error(ErrorCode::ParseError, "truncated key header");
  const std::uint32_t n = get_u32(data.subspan(8, 4));
  const std::uint32_t r = get_u32(data.subspan(12, 4));
  const std::uint64_t nbits = std::uint64_t{n} * r;
  if (n == 0 || r == 0) throw Error(ErrorCode::ParseError, "key with zero n or r");
  if (data.size() - 16 != (nbits + 7) / 8) throw Error(ErrorCode::ParseError, "key body length mismatch");
  Bytes body(data.begin() + 16, data.end());
  if (nbits % 8 != 0 && (body.back() & (0xFFu >> (nbits % 8))) != 0) {
    throw Error(ErrorCode::ParseError, "non-zero key padding bits");
  }
  return Key(n, r, Bits(std::move(body), nbits));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::IOError, "write failed for " + path.string());
}

void write_key_file(const std::filesystem::path& path, const Key& key, bool hex) {
  if (hex) {
    const std::string text = encode_key_hex(key);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } else {
    write_file(path, encode_key(key));
  }
}

Key read_key_file(const std::filesystem::path& path) { return decode_key(read_file(path)); }

}  // namespace gqads
