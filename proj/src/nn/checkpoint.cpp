#include "sortline/nn/checkpoint.hpp"

#include "sortline/io.hpp"

namespace sortline::nn {

using nlohmann::json;

json network_to_json(const Network& net) {
  return {{"sizes", net.sizes()},
          {"parameters", std::vector<double>(net.parameters().begin(), net.parameters().end())}};
}

Network network_from_json(const json& j) {
  auto sizes = j.at("sizes").get<std::vector<int>>();
  auto params = j.at("parameters").get<std::vector<double>>();
  Network net = Network::zeros(std::move(sizes));
  if (params.size() != net.parameter_count())
    throw ShapeError("checkpoint holds " + std::to_string(params.size()) +
                     " parameters, layer sizes imply " + std::to_string(net.parameter_count()));
  net.set_parameters(params);
  return net;
}

json adam_to_json(const Adam& opt) {
  const auto& c = opt.config();
  return {{"learning_rate", c.learning_rate}, {"beta1", c.beta1},   {"beta2", c.beta2},
          {"epsilon", c.epsilon},             {"steps", opt.steps()}, {"m", opt.first_moment()},
          {"v", opt.second_moment()}};
}

Adam adam_from_json(const json& j, size_t parameter_count) {
  AdamConfig c{j.at("learning_rate").get<double>(), j.at("beta1").get<double>(),
               j.at("beta2").get<double>(), j.at("epsilon").get<double>()};
  Adam opt(parameter_count, c);
  opt.restore(j.at("m").get<std::vector<double>>(), j.at("v").get<std::vector<double>>(),
              j.at("steps").get<std::int64_t>());
  return opt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json nets = json::object();
  for (const auto& [name, net] : ckpt.networks) nets[name] = network_to_json(net);
  json doc{{"format", kCheckpointFormat},
           {"version", kCheckpointVersion},
           {"meta", ckpt.meta},
           {"networks", nets}};
  write_file_atomic(path, doc.dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (doc.value("format", "") != kCheckpointFormat)
    throw std::runtime_error(path.string() + " is not a sortline checkpoint");
  if (doc.value("version", 0) != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version in " + path.string());
  Checkpoint ckpt;
  ckpt.meta = doc.value("meta", json::object());
  for (const auto& [name, net] : doc.at("networks").items())
    ckpt.networks.emplace(name, network_from_json(net));
  return ckpt;
}

}  // namespace sortline::nn
