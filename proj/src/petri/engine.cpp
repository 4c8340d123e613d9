#include "sortline/petri/engine.hpp"

#include <string>

namespace sortline::petri {

namespace {

bool admitted_by_guard(Guard g, const Token& tok) {
  switch (g) {
    case Guard::any: return tok.kind != TokenKind::countdown;
    case Guard::raw_product: return tok.kind == TokenKind::product && !tok.riveted;
    case Guard::finished_product: return tok.kind == TokenKind::product && tok.riveted;
  }
  return false;
}

int matching(const std::vector<Token>& tokens, Guard g) {
  int n = 0;
  for (const auto& tok : tokens) n += admitted_by_guard(g, tok) ? 1 : 0;
  return n;
}

Token build_output(const OutputRule& rule, const std::vector<std::vector<Token>>& consumed,
                   int k) {
  if (rule.emit == Emit::black) return Token::resource();
  if (rule.emit == Emit::carriage) return Token::carriage();
  if (rule.source < 0 || static_cast<size_t>(rule.source) >= consumed.size() ||
      consumed[static_cast<size_t>(rule.source)].empty())
    throw NetError("output rule references a place the transition does not consume from");
  const auto& from = consumed[static_cast<size_t>(rule.source)];
  const Token& src = from[std::min(static_cast<size_t>(k), from.size() - 1)];
  switch (rule.emit) {
    case Emit::forward: return src;
    case Emit::rivet: return Token::product(src.color, true);
    case Emit::assemble: return Token::product(src.color, false);
    default: break;
  }
  return src;
}

void deliver(const PetriNet& net, Marking& m, const Delivery& d, int transition) {
  const Place& place = net.place(d.place);
  if (!place.admits.contains(d.token.kind))
    throw NetError("token " + describe(d.token) + " is not admissible in place " + place.name);
  auto& slot = m.tokens[static_cast<size_t>(d.place)];
  if (place.capacity && static_cast<int>(slot.size()) >= *place.capacity)
    throw CollisionDetected(d.place, transition);
  slot.push_back(d.token);
}

}  // namespace

NotEnabled::NotEnabled(int t)
    : std::runtime_error("transition " + std::to_string(t) + " is not enabled"), transition(t) {}

CollisionDetected::CollisionDetected(int p, int t)
    : std::runtime_error("collision at place " + std::to_string(p) + " (transition " +
                         std::to_string(t) + ")"),
      place(p),
      transition(t) {}

bool is_busy(const PetriNet& net, const Marking& m, int t) {
  const int h = net.transition(t).hidden_place;
  return h >= 0 && !m.tokens[static_cast<size_t>(h)].empty();
}

bool is_enabled(const PetriNet& net, const Marking& m, int t) {
  if (is_busy(net, m, t)) return false;
  for (int p = 0; p < net.place_count(); ++p) {
    const int need = net.pre(p, t);
    if (need > 0 && matching(m.tokens[static_cast<size_t>(p)], net.guard(p, t)) < need)
      return false;
  }
  return true;
}

std::vector<int> enabled_transitions(const PetriNet& net, const Marking& m) {
  std::vector<int> out;
  for (int t = 0; t < net.transition_count(); ++t)
    if (is_enabled(net, m, t)) out.push_back(t);
  return out;
}

Marking fire(const PetriNet& net, Marking m, int t) {
  if (t < 0 || t >= net.transition_count() || !is_enabled(net, m, t)) throw NotEnabled(t);

  std::vector<std::vector<Token>> consumed(static_cast<size_t>(net.place_count()));
  for (int p = 0; p < net.place_count(); ++p) {
    int need = net.pre(p, t);
    if (need == 0) continue;
    const Guard g = net.guard(p, t);
    auto& slot = m.tokens[static_cast<size_t>(p)];
    for (auto it = slot.begin(); it != slot.end() && need > 0;) {
      if (admitted_by_guard(g, *it)) {
        consumed[static_cast<size_t>(p)].push_back(*it);
        it = slot.erase(it);
        --need;
      } else {
        ++it;
      }
    }
  }

  std::vector<Delivery> outputs;
  for (int p = 0; p < net.place_count(); ++p) {
    const int n = net.post(p, t);
    if (n == 0) continue;
    const OutputRule rule = net.output_rule(p, t);
    for (int k = 0; k < n; ++k) outputs.push_back({p, build_output(rule, consumed, k)});
  }

  const Transition& tr = net.transition(t);
  if (tr.duration == 0) {
    for (const auto& d : outputs) deliver(net, m, d, t);
    return m;
  }
  m.tokens[static_cast<size_t>(tr.hidden_place)].push_back(Token::countdown(tr.duration));
  m.pending[static_cast<size_t>(t)] = std::move(outputs);
  return m;
}

TickResult tick(const PetriNet& net, Marking m) {
  TickResult result;
  ++m.tick;
  for (int t = 0; t < net.transition_count(); ++t) {
    const int h = net.transition(t).hidden_place;
    if (h < 0) continue;
    auto& slot = m.tokens[static_cast<size_t>(h)];
    if (slot.empty()) continue;
    if (--slot.front().remaining > 0) continue;
    slot.clear();
    auto held = std::move(m.pending[static_cast<size_t>(t)]);
    m.pending[static_cast<size_t>(t)].clear();
    for (const auto& d : held) deliver(net, m, d, t);
    result.completed.push_back({t, std::move(held)});
  }
  result.marking = std::move(m);
  return result;
}

}  // namespace sortline::petri
