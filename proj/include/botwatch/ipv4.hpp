#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "botwatch/errors.hpp"

namespace botwatch {

struct Ipv4 {
  std::uint32_t value = 0;  // host byte order

  auto operator<=>(const Ipv4&) const = default;

  static constexpr Ipv4 from_octets(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    return Ipv4{(std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d};
  }

  /// Strict dotted-quad parse; returns nullopt on anything else.
  static std::optional<Ipv4> parse(std::string_view text) {
    std::uint32_t out = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int octet = 0; octet < 4; ++octet) {
      if (octet > 0) {
        if (p == end || *p != '.') return std::nullopt;
        ++p;
      }
      unsigned v = 0;
      const char* start = p;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{} || next == start || next - start > 3 || v > 255 ||
          (next - start > 1 && *start == '0')) return std::nullopt;
      out = (out << 8) | v;
      p = next;
    }
    if (p != end) return std::nullopt;
    return Ipv4{out};
  }

  std::string to_string() const {
    return std::to_string(value >> 24) + '.' + std::to_string((value >> 16) & 0xFF) + '.' +
           std::to_string((value >> 8) & 0xFF) + '.' + std::to_string(value & 0xFF);
  }
};

struct Cidr {
  Ipv4 network;
  int prefix = 0;

  bool operator==(const Cidr&) const = default;

  constexpr std::uint32_t mask() const {
    return prefix == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix);
  }

  constexpr bool contains(Ipv4 ip) const { return (ip.value & mask()) == network.value; }

  /// Parses "a.b.c.d/n"; host bits must be zero.
  static Cidr parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) throw ConfigError("invalid CIDR '" + std::string(text) + "': missing '/'");
    const auto addr = Ipv4::parse(text.substr(0, slash));
    const auto bits = text.substr(slash + 1);
    int prefix = -1;
    auto [next, ec] = std::from_chars(bits.data(), bits.data() + bits.size(), prefix);
    if (!addr || ec != std::errc{} || next != bits.data() + bits.size() || bits.empty() || prefix < 0 ||
        prefix > 32) {
      throw ConfigError("invalid CIDR '" + std::string(text) + "'");
    }
    Cidr c{*addr, prefix};
    if ((addr->value & c.mask()) != addr->value) {
      throw ConfigError("invalid CIDR '" + std::string(text) + "': host bits set");
    }
    return c;
  }

  std::string to_string() const { return network.to_string() + '/' + std::to_string(prefix); }
};

}  // namespace botwatch
