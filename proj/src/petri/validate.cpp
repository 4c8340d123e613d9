#include "sortline/petri/validate.hpp"

#include <deque>
#include <unordered_set>

#include "sortline/petri/engine.hpp"

namespace sortline::petri {

namespace {

void add(std::vector<Diagnostic>& out, DiagnosticKind kind, std::string message) {
  out.push_back({kind, std::move(message)});
}

void check_places(const PetriNet& net, std::vector<Diagnostic>& out) {
  for (const auto& p : net.places()) {
    const auto where = "place " + p.name + ": ";
    switch (p.cls) {
      case PlaceClass::resource:
        if (!p.admits.only(TokenKind::resource_unit) || p.capacity != 1)
          add(out, DiagnosticKind::place_class_violation,
              where + "resource places hold a single resource unit");
        break;
      case PlaceClass::hidden:
        if (!p.admits.only(TokenKind::countdown) || p.capacity != 1)
          add(out, DiagnosticKind::place_class_violation,
              where + "hidden places hold a single countdown token");
        break;
      case PlaceClass::regular:
      case PlaceClass::regular_short:
        if (p.capacity != 1)
          add(out, DiagnosticKind::place_class_violation, where + "regular places have capacity 1");
        if (p.admits.contains(TokenKind::countdown))
          add(out, DiagnosticKind::place_class_violation, where + "countdown tokens not allowed");
        break;
      case PlaceClass::storage:
        if (p.capacity)
          add(out, DiagnosticKind::place_class_violation, where + "storage places are unbounded");
        if (p.admits.contains(TokenKind::countdown))
          add(out, DiagnosticKind::place_class_violation, where + "countdown tokens not allowed");
        break;
    }
  }
}

void check_transitions(const PetriNet& net, std::vector<Diagnostic>& out) {
  const int np = net.place_count();
  std::vector<int> owner(static_cast<size_t>(np), -1);
  for (int t = 0; t < net.transition_count(); ++t) {
    const auto& tr = net.transition(t);
    const auto where = "transition " + tr.name + ": ";
    if (tr.duration < 0 || tr.duration > kMaxCountdown)
      add(out, DiagnosticKind::bad_duration, where + "duration outside [0, 4]");
    if (tr.hidden_place < 0) {
      add(out, DiagnosticKind::missing_hidden_place, where + "no hidden place");
    } else if (tr.hidden_place >= np ||
               net.place(tr.hidden_place).cls != PlaceClass::hidden) {
      add(out, DiagnosticKind::bad_hidden_place, where + "hidden place is not of class hidden");
    } else if (owner[static_cast<size_t>(tr.hidden_place)] >= 0) {
      add(out, DiagnosticKind::bad_hidden_place, where + "hidden place shared with another transition");
    } else {
      owner[static_cast<size_t>(tr.hidden_place)] = t;
    }
    for (const auto& g : tr.guards)
      if (g.place < 0 || g.place >= np || net.pre(g.place, t) == 0)
        add(out, DiagnosticKind::bad_inscription, where + "guard on a place without an input arc");
    for (const auto& r : tr.outputs) {
      if (r.place < 0 || r.place >= np || net.post(r.place, t) == 0) {
        add(out, DiagnosticKind::bad_inscription, where + "rule on a place without an output arc");
        continue;
      }
      const bool needs_source =
          r.emit == Emit::forward || r.emit == Emit::rivet || r.emit == Emit::assemble;
      if (needs_source && (r.source < 0 || r.source >= np || net.pre(r.source, t) == 0))
        add(out, DiagnosticKind::bad_inscription, where + "rule source is not an input place");
    }
  }
  int hidden = 0;
  for (int p = 0; p < np; ++p) {
    if (net.place(p).cls != PlaceClass::hidden) continue;
    ++hidden;
    if (owner[static_cast<size_t>(p)] < 0)
      add(out, DiagnosticKind::bad_hidden_place, "place " + net.place(p).name + ": orphan hidden place");
    for (int t = 0; t < net.transition_count(); ++t)
      if (net.pre(p, t) != 0 || net.post(p, t) != 0)
        add(out, DiagnosticKind::bad_hidden_place,
            "place " + net.place(p).name + ": hidden places carry no arcs");
  }
  if (hidden != net.transition_count())
    add(out, DiagnosticKind::missing_hidden_place,
        "hidden place count " + std::to_string(hidden) + " differs from transition count " +
            std::to_string(net.transition_count()));
}

void check_initial(const PetriNet& net, std::vector<Diagnostic>& out) {
  const auto& m = net.initial_marking();
  if (static_cast<int>(m.tokens.size()) != net.place_count() ||
      static_cast<int>(m.pending.size()) != net.transition_count()) {
    add(out, DiagnosticKind::invalid_initial_marking, "initial marking has the wrong shape");
    return;
  }
  for (int p = 0; p < net.place_count(); ++p) {
    const auto& place = net.place(p);
    const auto& slot = m.tokens[static_cast<size_t>(p)];
    if (place.capacity && static_cast<int>(slot.size()) > *place.capacity)
      add(out, DiagnosticKind::invalid_initial_marking, "place " + place.name + " over capacity");
    for (const auto& tok : slot)
      if (!place.admits.contains(tok.kind))
        add(out, DiagnosticKind::invalid_initial_marking,
            "place " + place.name + " holds inadmissible " + describe(tok));
  }
}

}  // namespace

std::vector<Diagnostic> validate_structure(const PetriNet& net) {
  std::vector<Diagnostic> out;
  const auto cells = static_cast<size_t>(net.place_count()) * static_cast<size_t>(net.transition_count());
  if (net.pre_matrix().size() != cells || net.post_matrix().size() != cells) {
    add(out, DiagnosticKind::dimension_mismatch,
        "pre/post must be " + std::to_string(net.place_count()) + " x " +
            std::to_string(net.transition_count()));
    return out;
  }
  for (size_t i = 0; i < cells; ++i)
    if (net.pre_matrix()[i] < 0 || net.post_matrix()[i] < 0) {
      add(out, DiagnosticKind::negative_arc_weight, "negative arc weight");
      break;
    }
  check_places(net, out);
  check_transitions(net, out);
  check_initial(net, out);
  return out;
}

std::vector<Diagnostic> validate_net(const PetriNet& net, int marking_budget) {
  auto out = validate_structure(net);
  if (!out.empty()) return out;

  const int nt = net.transition_count();
  std::vector<bool> fired(static_cast<size_t>(nt), false);
  int remaining = nt;
  std::unordered_set<std::string> seen;
  std::deque<Marking> frontier;
  seen.insert(net.initial_marking().key());
  frontier.push_back(net.initial_marking());

  auto visit = [&](Marking m) {
    try {
      auto next = tick(net, std::move(m)).marking;
      if (static_cast<int>(seen.size()) < marking_budget && seen.insert(next.key()).second)
        frontier.push_back(std::move(next));
    } catch (const CollisionDetected&) {
      // dead branch
    }
  };

  while (!frontier.empty() && remaining > 0) {
    Marking m = std::move(frontier.front());
    frontier.pop_front();
    for (int t : enabled_transitions(net, m)) {
      Marking after;
      try {
        after = fire(net, m, t);
      } catch (const CollisionDetected&) {
        continue;
      }
      if (!fired[static_cast<size_t>(t)]) {
        fired[static_cast<size_t>(t)] = true;
        --remaining;
      }
      visit(std::move(after));
    }
    visit(m);
  }

  for (int t = 0; t < nt; ++t)
    if (!fired[static_cast<size_t>(t)])
      add(out, DiagnosticKind::unfireable_transition,
          "transition " + net.transition(t).name + " never fires within " +
              std::to_string(marking_budget) + " reachable markings");
  return out;
}

}  // namespace sortline::petri
