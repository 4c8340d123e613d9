#include "sortline/petri/marking.hpp"

namespace sortline::petri {

namespace {

void append_token(std::string& out, const Token& t) {
  out.push_back(static_cast<char>(t.kind));
  out.push_back(static_cast<char>(t.color));
  out.push_back(static_cast<char>(t.riveted));
  out.push_back(static_cast<char>(t.remaining));
}

}  // namespace

std::vector<int> Marking::counts() const {
  std::vector<int> c;
  c.reserve(tokens.size());
  for (const auto& place : tokens) c.push_back(static_cast<int>(place.size()));
  return c;
}

std::string Marking::key() const {
  std::string out;
  for (const auto& place : tokens) {
    out.push_back('|');
    for (const auto& t : place) append_token(out, t);
  }
  out.push_back('#');
  for (const auto& held : pending) {
    out.push_back('|');
    for (const auto& d : held) {
      out.push_back(static_cast<char>(d.place));
      append_token(out, d.token);
    }
  }
  return out;
}

}  // namespace sortline::petri
