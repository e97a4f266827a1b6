#include "textrts/util.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace textrts {

std::string to_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string hex_digest(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out, base);
  return ec == std::errc{} && ptr == last;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty()) throw std::runtime_error("empty seed list");
  std::vector<std::uint64_t> seeds;
  auto range_pos = spec.find("..");
  if (range_pos != std::string_view::npos) {
    std::uint64_t lo = 0, hi = 0;
    if (!parse_u64(trim(spec.substr(0, range_pos)), lo) ||
        !parse_u64(trim(spec.substr(range_pos + 2)), hi) || hi < lo) {
      throw std::runtime_error("bad seed range: " + std::string(spec));
    }
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  for (const auto& part : split(spec, ',')) {
    std::uint64_t v = 0;
    if (!parse_u64(trim(part), v)) {
      throw std::runtime_error("bad seed value: " + part);
    }
    seeds.push_back(v);
  }
  return seeds;
}

}  // namespace textrts
