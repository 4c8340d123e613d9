#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sortline::petri {

enum class Color : std::uint8_t { blue, green };

enum class TokenKind : std::uint8_t {
  carriage,
  raw_part,
  product,
  resource_unit,
  countdown,
};

inline constexpr int kTokenKindCount = 5;
inline constexpr int kMaxCountdown = 4;

/// A colored token. Only the fields relevant to `kind` are meaningful;
/// the others stay at their defaults so that equality is structural.
struct Token {
  TokenKind kind = TokenKind::resource_unit;
  Color color = Color::blue;
  bool riveted = false;
  int remaining = 0;

  static constexpr Token carriage() { return {TokenKind::carriage}; }
  static constexpr Token raw_part(Color c) { return {TokenKind::raw_part, c}; }
  static constexpr Token product(Color c, bool riveted) {
    return {TokenKind::product, c, riveted};
  }
  static constexpr Token resource() { return {TokenKind::resource_unit}; }
  static constexpr Token countdown(int remaining) {
    return {TokenKind::countdown, Color::blue, false, remaining};
  }

  friend bool operator==(const Token&, const Token&) = default;
};

/// Bit set over TokenKind.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<TokenKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  static constexpr KindSet all_but_countdown() {
    return {TokenKind::carriage, TokenKind::raw_part, TokenKind::product, TokenKind::resource_unit};
  }

  [[nodiscard]] constexpr bool contains(TokenKind k) const { return (bits_ & bit(k)) != 0; }
  [[nodiscard]] constexpr bool only(TokenKind k) const { return bits_ == bit(k); }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  constexpr void insert(TokenKind k) { bits_ |= bit(k); }

  friend bool operator==(const KindSet&, const KindSet&) = default;

 private:
  static constexpr std::uint8_t bit(TokenKind k) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(k));
  }
  std::uint8_t bits_ = 0;
};

std::string_view to_string(Color c);
std::string_view to_string(TokenKind k);
Color parse_color(std::string_view s);
TokenKind parse_token_kind(std::string_view s);
std::string describe(const Token& t);

}  // namespace sortline::petri
