// Command-line front end: train, eval, compare, describe, validate.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>

#include "sortline/env/encoding.hpp"
#include "sortline/errors.hpp"
#include "sortline/harness/config.hpp"
#include "sortline/harness/report.hpp"
#include "sortline/harness/training.hpp"
#include "sortline/io.hpp"
#include "sortline/petri/net_json.hpp"
#include "sortline/petri/validate.hpp"

namespace {

using namespace sortline;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;

struct TrainFlags {
  std::string config, algo, reward, seeds, out;
  std::optional<int> episodes, parallel;
};

// File, then SORTLINE_* variables, then flags.
harness::ExperimentConfig effective_config(const TrainFlags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    try {
      doc = read_json_file(f.config);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }
  harness::apply_env_overrides(doc, harness::process_environment());
  if (!f.algo.empty()) doc["algo"] = f.algo;
  if (!f.reward.empty()) doc["reward"] = f.reward;
  if (!f.seeds.empty()) doc["seeds"] = harness::parse_seed_list(f.seeds);
  if (!f.out.empty()) doc["out"] = f.out;
  if (f.episodes) doc["episodes"] = *f.episodes;
  if (f.parallel) doc["parallel"] = *f.parallel;
  return harness::config_from_json(doc);
}

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--algo", f.algo, "dqn or ppo");
  cmd->add_option("--reward", f.reward, "r1 or r2");
  cmd->add_option("--seeds", f.seeds, "comma-separated seed list");
  cmd->add_option("--episodes", f.episodes, "training episodes per seed");
  cmd->add_option("--out", f.out, "output root");
  cmd->add_option("--parallel", f.parallel, "seeds trained at once");
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

int cmd_train(const TrainFlags& f) {
  const auto cfg = effective_config(f);
  const auto results = harness::run_training(cfg);
  for (const auto& r : results)
    std::cout << r.dir.string() << (r.skipped ? " (already complete)" : r.resumed ? " (resumed)" : "") << "\n";
  return 0;
}

struct EvalFlags {
  std::string checkpoint, reward = "r1";
  int episodes = harness::kFinalEvalEpisodes;
  std::uint64_t seed = 1;
  int products = env::kDefaultProducts;
};

int cmd_eval(const EvalFlags& f) {
  env::EnvConfig e;
  e.reward = env::parse_reward_variant(f.reward);
  e.n_products = f.products;
  const auto ck = nn::load_checkpoint(f.checkpoint);
  const auto s = harness::evaluate_policy(ck, e, f.episodes, f.seed);
  json out{{"episodes", s.episodes}, {"success_pct", s.success_pct}, {"correct_pct", s.correct_pct}};
  out["success_length"] = s.success_length ? json(*s.success_length) : json(nullptr);
  std::cout << out.dump() << "\n";
  return 0;
}

struct CompareFlags {
  std::string out = "runs", report, seeds = "1,2,3,4,5";
  std::vector<std::string> algos, rewards;
  int window = harness::kSmoothWindow;
};

int cmd_compare(const CompareFlags& f) {
  std::vector<harness::Cell> cells;
  for (const auto& c : harness::all_cells()) {
    auto listed = [](const std::vector<std::string>& v, std::string_view s) {
      return v.empty() || std::find(v.begin(), v.end(), s) != v.end();
    };
    if (listed(f.algos, harness::to_string(c.algo)) && listed(f.rewards, env::to_string(c.reward)))
      cells.push_back(c);
  }
  for (const auto& a : f.algos) harness::parse_algo(a);
  for (const auto& r : f.rewards) env::parse_reward_variant(r);
  const auto seeds = harness::parse_seed_list(f.seeds);
  const std::string report_dir = f.report.empty() ? f.out + "/report" : f.report;
  const auto rep = harness::compare(f.out, cells, seeds, report_dir, f.window);
  std::printf("%-8s %-6s %6s %16s %16s %16s\n", "algo", "reward", "seeds", "success %", "correct %",
              "length (ticks)");
  for (const auto& r : rep.rows) {
    const std::string len = r.success_length ? pct(r.success_length->mean) + " ± " + pct(r.success_length->std) : "-";
    std::printf("%-8s %-6s %6zu %16s %16s %16s%s\n", std::string(harness::to_string(r.cell.algo)).c_str(),
                std::string(env::to_string(r.cell.reward)).c_str(), r.seeds.size(),
                (pct(r.success_pct.mean) + " ± " + pct(r.success_pct.std)).c_str(),
                (pct(r.correct_pct.mean) + " ± " + pct(r.correct_pct.std)).c_str(), len.c_str(),
                r.single_seed ? "  (single seed, std is 0)" : "");
  }
  std::cout << "report written to " << report_dir << "\n";
  return 0;
}

int cmd_describe(bool as_json, const std::string& config) {
  const auto topo = factory::build_factory();
  const auto& net = topo.net();
  if (as_json) {
    std::cout << petri::net_to_json(net).dump(2) << "\n";
    return 0;
  }
  if (!config.empty()) {
    TrainFlags f;
    f.config = config;
    std::cout << harness::to_json(effective_config(f)).dump(2) << "\n";
    return 0;
  }
  const auto blocks = env::observation_blocks(topo);
  std::printf("places (%d), observation width %d\n", net.place_count(), factory::kObservationSize);
  for (int p = 0; p < net.place_count(); ++p) {
    const auto& pl = net.place(p);
    const auto& b = blocks[static_cast<size_t>(p)];
    std::printf("  %-28s %-14s offset %3d width %d\n", pl.name.c_str(), std::string(petri::to_string(pl.cls)).c_str(),
                b.offset, b.width);
  }
  std::printf("actions (%d)\n", factory::kActionCount);
  for (int t = 0; t < factory::kMoveCount; ++t)
    std::printf("  %2d %-28s %d ticks\n", t, net.transition(t).name.c_str(), net.transition(t).duration);
  std::printf("  %2d %-28s\n", factory::kNonAction, "non-action");
  return 0;
}

int cmd_validate(const std::string& config, const std::string& net_path) {
  if (!config.empty()) {
    TrainFlags f;
    f.config = config;
    effective_config(f);
    std::cout << config << ": ok\n";
  }
  if (!net_path.empty() || config.empty()) {
    const auto net = net_path.empty() ? factory::build_factory().net() : petri::load_net(net_path);
    const auto diags = petri::validate_net(net);
    for (const auto& d : diags) std::cout << d.message << "\n";
    if (!diags.empty()) return kExitConfig;
    std::cout << (net_path.empty() ? "canonical factory net" : net_path) << ": ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Petri-net sorting line with DQN and PPO learners"};
  app.require_subcommand(1);

  TrainFlags train;
  auto* c_train = app.add_subcommand("train", "train every seed of one algorithm and reward cell");
  add_train_flags(c_train, train);

  EvalFlags ev;
  auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint greedily");
  c_eval->add_option("--checkpoint", ev.checkpoint, "checkpoint file")->required();
  c_eval->add_option("--reward", ev.reward, "r1 or r2");
  c_eval->add_option("--episodes", ev.episodes, "evaluation episodes");
  c_eval->add_option("--seed", ev.seed, "color sequence seed");
  c_eval->add_option("--products", ev.products, "products per episode");

  CompareFlags cmp;
  auto* c_cmp = app.add_subcommand("compare", "aggregate completed runs");
  c_cmp->add_option("--out", cmp.out, "output root holding the runs");
  c_cmp->add_option("--report", cmp.report, "report directory (default <out>/report)");
  c_cmp->add_option("--seeds", cmp.seeds, "comma-separated seed list");
  c_cmp->add_option("--algo", cmp.algos, "restrict to these algorithms");
  c_cmp->add_option("--reward", cmp.rewards, "restrict to these reward variants");
  c_cmp->add_option("--window", cmp.window, "smoothing window in evaluation points");

  bool as_json = false;
  std::string describe_config;
  auto* c_desc = app.add_subcommand("describe", "print the canonical net or an effective config");
  c_desc->add_flag("--json", as_json, "dump the net document");
  c_desc->add_option("--config", describe_config, "show this config after overrides");

  std::string val_config, val_net;
  auto* c_val = app.add_subcommand("validate", "check a config file or a net document");
  c_val->add_option("--config", val_config, "JSON config file");
  c_val->add_option("--net", val_net, "net document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*c_train) return cmd_train(train);
    if (*c_eval) return cmd_eval(ev);
    if (*c_cmp) return cmd_compare(cmp);
    if (*c_desc) return cmd_describe(as_json, describe_config);
    if (*c_val) return cmd_validate(val_config, val_net);
  } catch (const harness::MissingRun& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const petri::NetError& e) {
    std::cerr << "net error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
