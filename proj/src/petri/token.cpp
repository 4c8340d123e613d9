#include "sortline/petri/token.hpp"

#include <stdexcept>

namespace sortline::petri {

std::string_view to_string(Color c) { return c == Color::blue ? "blue" : "green"; }

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::carriage: return "carriage";
    case TokenKind::raw_part: return "raw_part";
    case TokenKind::product: return "product";
    case TokenKind::resource_unit: return "resource_unit";
    case TokenKind::countdown: return "countdown";
  }
  return "?";
}

Color parse_color(std::string_view s) {
  if (s == "blue") return Color::blue;
  if (s == "green") return Color::green;
  throw std::invalid_argument("unknown color: " + std::string(s));
}

TokenKind parse_token_kind(std::string_view s) {
  for (int i = 0; i < kTokenKindCount; ++i) {
    auto k = static_cast<TokenKind>(i);
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown token kind: " + std::string(s));
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::raw_part: return "part(" + std::string(to_string(t.color)) + ")";
    case TokenKind::product:
      return std::string(to_string(t.color)) + (t.riveted ? "-finished" : "-raw");
    case TokenKind::countdown: return "countdown(" + std::to_string(t.remaining) + ")";
    default: return std::string(to_string(t.kind));
  }
}

}  // namespace sortline::petri
