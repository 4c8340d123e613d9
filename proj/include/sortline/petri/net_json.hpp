#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "sortline/petri/net.hpp"

namespace sortline::petri {

inline constexpr const char* kNetFormat = "sortline-petri-net";
inline constexpr int kNetFormatVersion = 1;

nlohmann::json token_to_json(const Token& t);
Token token_from_json(const nlohmann::json& j);

/// Dense document: places, transitions (with inscriptions), pre/post as
/// |P| rows of |T| integers, durations and the initial marking.
nlohmann::json net_to_json(const PetriNet& net);

/// Throws NetError on malformed documents. Shape errors inside pre/post
/// are rejected here since the dense arrays must be rectangular.
PetriNet net_from_json(const nlohmann::json& j);

void save_net(const PetriNet& net, const std::filesystem::path& path);
PetriNet load_net(const std::filesystem::path& path);

}  // namespace sortline::petri
