#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sortline/petri/marking.hpp"
#include "sortline/petri/token.hpp"

namespace sortline::petri {

enum class PlaceClass { resource, storage, regular, regular_short, hidden };

std::string_view to_string(PlaceClass c);
PlaceClass parse_place_class(std::string_view s);

struct Place {
  std::string name;
  PlaceClass cls = PlaceClass::storage;
  std::optional<int> capacity;  // nullopt: unbounded
  KindSet admits = KindSet::all_but_countdown();
};

/// Filter applied to the tokens an input arc may consume.
enum class Guard { any, raw_product, finished_product };

/// How an output arc constructs the tokens it deposits.
///   black      a resource-unit token (plain "black dot")
///   carriage   an empty carriage
///   forward    the token consumed from `source`, unchanged
///   rivet      the product consumed from `source`, riveted
///   assemble   an unriveted product colored like the part consumed from `source`
enum class Emit { black, carriage, forward, rivet, assemble };

std::string_view to_string(Guard g);
std::string_view to_string(Emit e);
Guard parse_guard(std::string_view s);
Emit parse_emit(std::string_view s);

struct InputGuard {
  int place = 0;
  Guard guard = Guard::any;
};

struct OutputRule {
  int place = 0;
  Emit emit = Emit::black;
  int source = -1;
};

struct Transition {
  std::string name;
  int duration = 0;
  int hidden_place = -1;
  std::vector<InputGuard> guards;   // arcs without an entry use Guard::any
  std::vector<OutputRule> outputs;  // arcs without an entry use Emit::black
};

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable place/transition structure N = (P, T, Pre, Post) with arc
/// inscriptions and per-transition durations. Hidden places (one per
/// transition) carry the countdown of a transition in progress and never
/// appear in Pre/Post.
class PetriNet {
 public:
  PetriNet() = default;
  PetriNet(std::vector<Place> places, std::vector<Transition> transitions, std::vector<int> pre,
           std::vector<int> post, Marking initial);

  [[nodiscard]] int place_count() const { return static_cast<int>(places_.size()); }
  [[nodiscard]] int transition_count() const { return static_cast<int>(transitions_.size()); }
  [[nodiscard]] const std::vector<Place>& places() const { return places_; }
  [[nodiscard]] const std::vector<Transition>& transitions() const { return transitions_; }
  [[nodiscard]] const Place& place(int p) const { return places_.at(static_cast<size_t>(p)); }
  [[nodiscard]] const Transition& transition(int t) const {
    return transitions_.at(static_cast<size_t>(t));
  }

  /// Row-major |P| x |T| matrices; raw storage may be shaped wrongly, which
  /// validate_net reports.
  [[nodiscard]] int pre(int p, int t) const { return pre_[index(p, t)]; }
  [[nodiscard]] int post(int p, int t) const { return post_[index(p, t)]; }
  [[nodiscard]] const std::vector<int>& pre_matrix() const { return pre_; }
  [[nodiscard]] const std::vector<int>& post_matrix() const { return post_; }

  [[nodiscard]] Guard guard(int p, int t) const;
  [[nodiscard]] OutputRule output_rule(int p, int t) const;

  [[nodiscard]] const Marking& initial_marking() const { return initial_; }
  [[nodiscard]] int find_place(std::string_view name) const;
  [[nodiscard]] int find_transition(std::string_view name) const;

 private:
  [[nodiscard]] size_t index(int p, int t) const {
    return static_cast<size_t>(p) * transitions_.size() + static_cast<size_t>(t);
  }

  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<int> pre_;
  std::vector<int> post_;
  Marking initial_;
};

/// Convenience builder used by the factory and the tests.
class NetBuilder {
 public:
  int add_place(std::string name, PlaceClass cls, std::optional<int> capacity, KindSet admits);
  int add_transition(std::string name, int duration);

  void input(int place, int transition, int count = 1, Guard guard = Guard::any);
  void output(int place, int transition, int count = 1, Emit emit = Emit::black, int source = -1);

  /// Adds one hidden place per transition that lacks one.
  void add_hidden_places(const std::string& prefix = "h_");

  /// Tokens placed into the initial marking.
  void mark(int place, Token token, int count = 1);

  [[nodiscard]] PetriNet build() const;

 private:
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  struct Arc {
    int place;
    int transition;
    int count;
  };
  std::vector<Arc> pre_arcs_;
  std::vector<Arc> post_arcs_;
  std::vector<std::pair<int, Token>> initial_;
};

}  // namespace sortline::petri
