#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace textrts {

// FNV-1a 64-bit. Used for state hashes, result hashes and trace digests.
// Doubles are quantized to micro-units first so the hash is stable across
// serialization round trips.
class Fnv1a {
 public:
  void feed(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 1099511628211ull;
    }
  }
  void feed(std::string_view s) { feed(s.data(), s.size()); }
  void feed_u64(std::uint64_t v) { feed(&v, sizeof v); }
  void feed_i64(std::int64_t v) { feed(&v, sizeof v); }
  void feed_double(double v) {
    auto q = static_cast<std::int64_t>(v * 1e6 + (v >= 0 ? 0.5 : -0.5));
    feed_i64(q);
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 1469598103934665603ull;
};

inline std::uint64_t fnv1a(std::string_view s) {
  Fnv1a h;
  h.feed(s);
  return h.digest();
}

std::string to_hex(std::uint64_t v);  // "0x1a3", lowercase, no padding
std::string hex_digest(std::uint64_t v);  // zero-padded 16-digit hex, no 0x

// Accepts decimal or 0x-prefixed hex. Returns false on overflow/garbage.
bool parse_u64(std::string_view s, std::uint64_t& out);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with(std::string_view s, std::string_view prefix);

// "1..20" or "3,7,11" or "5" -> list of seeds. Throws std::runtime_error.
std::vector<std::uint64_t> parse_seed_list(std::string_view spec);

}  // namespace textrts
