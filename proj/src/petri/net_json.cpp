#include "sortline/petri/net_json.hpp"

#include <fstream>

namespace sortline::petri {

using nlohmann::json;

namespace {

json kinds_to_json(KindSet s) {
  json out = json::array();
  for (int i = 0; i < kTokenKindCount; ++i) {
    auto k = static_cast<TokenKind>(i);
    if (s.contains(k)) out.push_back(std::string(to_string(k)));
  }
  return out;
}

KindSet kinds_from_json(const json& j) {
  KindSet s;
  for (const auto& k : j) s.insert(parse_token_kind(k.get<std::string>()));
  return s;
}

std::vector<int> matrix_from_json(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw NetError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  std::vector<int> flat;
  flat.reserve(static_cast<size_t>(rows) * static_cast<size_t>(cols));
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw NetError(std::string(what) + ": expected rows of width " + std::to_string(cols));
    for (const auto& v : row) flat.push_back(v.get<int>());
  }
  return flat;
}

}  // namespace

json token_to_json(const Token& t) {
  json j{{"kind", to_string(t.kind)}};
  switch (t.kind) {
    case TokenKind::raw_part: j["color"] = to_string(t.color); break;
    case TokenKind::product:
      j["color"] = to_string(t.color);
      j["riveted"] = t.riveted;
      break;
    case TokenKind::countdown: j["remaining"] = t.remaining; break;
    default: break;
  }
  return j;
}

Token token_from_json(const json& j) {
  Token t;
  t.kind = parse_token_kind(j.at("kind").get<std::string>());
  if (j.contains("color")) t.color = parse_color(j["color"].get<std::string>());
  t.riveted = j.value("riveted", false);
  t.remaining = j.value("remaining", 0);
  return t;
}

json net_to_json(const PetriNet& net) {
  json places = json::array();
  for (const auto& p : net.places()) {
    places.push_back({{"name", p.name},
                      {"class", to_string(p.cls)},
                      {"capacity", p.capacity ? json(*p.capacity) : json(nullptr)},
                      {"admits", kinds_to_json(p.admits)}});
  }
  json transitions = json::array();
  for (const auto& t : net.transitions()) {
    json guards = json::array();
    for (const auto& g : t.guards) guards.push_back({{"place", g.place}, {"guard", to_string(g.guard)}});
    json outputs = json::array();
    for (const auto& r : t.outputs)
      outputs.push_back({{"place", r.place}, {"emit", to_string(r.emit)}, {"source", r.source}});
    transitions.push_back({{"name", t.name},
                           {"duration", t.duration},
                           {"hidden_place", t.hidden_place},
                           {"guards", guards},
                           {"outputs", outputs}});
  }
  const int np = net.place_count();
  const int nt = net.transition_count();
  json pre = json::array(), post = json::array(), durations = json::array();
  for (int p = 0; p < np; ++p) {
    json pre_row = json::array(), post_row = json::array();
    for (int t = 0; t < nt; ++t) {
      pre_row.push_back(net.pre(p, t));
      post_row.push_back(net.post(p, t));
    }
    pre.push_back(pre_row);
    post.push_back(post_row);
  }
  for (const auto& t : net.transitions()) durations.push_back(t.duration);

  json marking = json::array();
  for (const auto& slot : net.initial_marking().tokens) {
    json tokens = json::array();
    for (const auto& tok : slot) tokens.push_back(token_to_json(tok));
    marking.push_back(tokens);
  }
  return {{"format", kNetFormat},  {"version", kNetFormatVersion},
          {"places", places},      {"transitions", transitions},
          {"pre", pre},            {"post", post},
          {"durations", durations}, {"initial_marking", marking}};
}

PetriNet net_from_json(const json& j) {
  try {
    if (j.value("format", "") != kNetFormat) throw NetError("not a sortline net document");
    if (j.value("version", 0) != kNetFormatVersion) throw NetError("unsupported net version");
    std::vector<Place> places;
    for (const auto& p : j.at("places")) {
      Place place;
      place.name = p.at("name").get<std::string>();
      place.cls = parse_place_class(p.at("class").get<std::string>());
      if (!p.at("capacity").is_null()) place.capacity = p["capacity"].get<int>();
      place.admits = kinds_from_json(p.at("admits"));
      places.push_back(std::move(place));
    }
    std::vector<Transition> transitions;
    for (const auto& t : j.at("transitions")) {
      Transition tr;
      tr.name = t.at("name").get<std::string>();
      tr.duration = t.at("duration").get<int>();
      tr.hidden_place = t.at("hidden_place").get<int>();
      for (const auto& g : t.value("guards", json::array()))
        tr.guards.push_back({g.at("place").get<int>(), parse_guard(g.at("guard").get<std::string>())});
      for (const auto& r : t.value("outputs", json::array()))
        tr.outputs.push_back({r.at("place").get<int>(), parse_emit(r.at("emit").get<std::string>()),
                              r.value("source", -1)});
      transitions.push_back(std::move(tr));
    }
    const int np = static_cast<int>(places.size());
    const int nt = static_cast<int>(transitions.size());
    auto pre = matrix_from_json(j.at("pre"), np, nt, "pre");
    auto post = matrix_from_json(j.at("post"), np, nt, "post");
    if (j.contains("durations")) {
      const auto& d = j["durations"];
      if (static_cast<int>(d.size()) != nt) throw NetError("durations: wrong length");
      for (int t = 0; t < nt; ++t)
        if (d[static_cast<size_t>(t)].get<int>() != transitions[static_cast<size_t>(t)].duration)
          throw NetError("durations disagree with transition records");
    }
    Marking m(np, nt);
    if (j.contains("initial_marking")) {
      const auto& im = j["initial_marking"];
      if (static_cast<int>(im.size()) != np) throw NetError("initial_marking: wrong length");
      for (int p = 0; p < np; ++p)
        for (const auto& tok : im[static_cast<size_t>(p)])
          m.tokens[static_cast<size_t>(p)].push_back(token_from_json(tok));
    }
    return PetriNet(std::move(places), std::move(transitions), std::move(pre), std::move(post),
                    std::move(m));
  } catch (const json::exception& e) {
    throw NetError(std::string("malformed net document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw NetError(e.what());
  }
}

void save_net(const PetriNet& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw NetError("cannot write " + path.string());
  out << net_to_json(net).dump(2) << '\n';
}

PetriNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NetError("cannot read " + path.string());
  return net_from_json(json::parse(in));
}

}  // namespace sortline::petri
