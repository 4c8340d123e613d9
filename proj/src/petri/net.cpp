#include "sortline/petri/net.hpp"

#include <algorithm>
#include <array>

namespace sortline::petri {

namespace {

template <typename E, size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, const char* what) {
  for (auto v : values)
    if (to_string(v) == s) return v;
  throw NetError(std::string("unknown ") + what + ": " + std::string(s));
}

}  // namespace

std::string_view to_string(PlaceClass c) {
  switch (c) {
    case PlaceClass::resource: return "resource";
    case PlaceClass::storage: return "storage";
    case PlaceClass::regular: return "regular";
    case PlaceClass::regular_short: return "regular_short";
    case PlaceClass::hidden: return "hidden";
  }
  return "?";
}

std::string_view to_string(Guard g) {
  switch (g) {
    case Guard::any: return "any";
    case Guard::raw_product: return "raw_product";
    case Guard::finished_product: return "finished_product";
  }
  return "?";
}

std::string_view to_string(Emit e) {
  switch (e) {
    case Emit::black: return "black";
    case Emit::carriage: return "carriage";
    case Emit::forward: return "forward";
    case Emit::rivet: return "rivet";
    case Emit::assemble: return "assemble";
  }
  return "?";
}

PlaceClass parse_place_class(std::string_view s) {
  return parse_enum(s,
                    std::array{PlaceClass::resource, PlaceClass::storage, PlaceClass::regular,
                               PlaceClass::regular_short, PlaceClass::hidden},
                    "place class");
}

Guard parse_guard(std::string_view s) {
  return parse_enum(s, std::array{Guard::any, Guard::raw_product, Guard::finished_product},
                    "guard");
}

Emit parse_emit(std::string_view s) {
  return parse_enum(
      s, std::array{Emit::black, Emit::carriage, Emit::forward, Emit::rivet, Emit::assemble},
      "emit rule");
}

PetriNet::PetriNet(std::vector<Place> places, std::vector<Transition> transitions,
                   std::vector<int> pre, std::vector<int> post, Marking initial)
    : places_(std::move(places)),
      transitions_(std::move(transitions)),
      pre_(std::move(pre)),
      post_(std::move(post)),
      initial_(std::move(initial)) {}

Guard PetriNet::guard(int p, int t) const {
  for (const auto& g : transition(t).guards)
    if (g.place == p) return g.guard;
  return Guard::any;
}

OutputRule PetriNet::output_rule(int p, int t) const {
  for (const auto& r : transition(t).outputs)
    if (r.place == p) return r;
  return OutputRule{p, Emit::black, -1};
}

int PetriNet::find_place(std::string_view name) const {
  auto it = std::find_if(places_.begin(), places_.end(),
                         [&](const Place& p) { return p.name == name; });
  if (it == places_.end()) throw NetError("no place named " + std::string(name));
  return static_cast<int>(it - places_.begin());
}

int PetriNet::find_transition(std::string_view name) const {
  auto it = std::find_if(transitions_.begin(), transitions_.end(),
                         [&](const Transition& t) { return t.name == name; });
  if (it == transitions_.end()) throw NetError("no transition named " + std::string(name));
  return static_cast<int>(it - transitions_.begin());
}

int NetBuilder::add_place(std::string name, PlaceClass cls, std::optional<int> capacity,
                          KindSet admits) {
  places_.push_back(Place{std::move(name), cls, capacity, admits});
  return static_cast<int>(places_.size()) - 1;
}

int NetBuilder::add_transition(std::string name, int duration) {
  transitions_.push_back(Transition{std::move(name), duration, -1, {}, {}});
  return static_cast<int>(transitions_.size()) - 1;
}

void NetBuilder::input(int place, int transition, int count, Guard guard) {
  pre_arcs_.push_back({place, transition, count});
  if (guard != Guard::any)
    transitions_.at(static_cast<size_t>(transition)).guards.push_back({place, guard});
}

void NetBuilder::output(int place, int transition, int count, Emit emit, int source) {
  post_arcs_.push_back({place, transition, count});
  if (emit != Emit::black)
    transitions_.at(static_cast<size_t>(transition)).outputs.push_back({place, emit, source});
}

void NetBuilder::add_hidden_places(const std::string& prefix) {
  for (auto& t : transitions_) {
    if (t.hidden_place >= 0) continue;
    t.hidden_place = add_place(prefix + t.name, PlaceClass::hidden, 1, {TokenKind::countdown});
  }
}

void NetBuilder::mark(int place, Token token, int count) {
  for (int i = 0; i < count; ++i) initial_.emplace_back(place, token);
}

PetriNet NetBuilder::build() const {
  const auto np = places_.size();
  const auto nt = transitions_.size();
  std::vector<int> pre(np * nt, 0), post(np * nt, 0);
  for (const auto& a : pre_arcs_)
    pre[static_cast<size_t>(a.place) * nt + static_cast<size_t>(a.transition)] += a.count;
  for (const auto& a : post_arcs_)
    post[static_cast<size_t>(a.place) * nt + static_cast<size_t>(a.transition)] += a.count;
  Marking m(static_cast<int>(np), static_cast<int>(nt));
  for (const auto& [p, tok] : initial_) m.tokens[static_cast<size_t>(p)].push_back(tok);
  return PetriNet(places_, transitions_, std::move(pre), std::move(post), std::move(m));
}

}  // namespace sortline::petri
