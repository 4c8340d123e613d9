#include "sortline/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sortline/errors.hpp"
#include "sortline/harness/training.hpp"
#include "sortline/io.hpp"

namespace sortline::harness {

using nlohmann::json;

std::vector<double> smooth(const std::vector<double>& series, int window) {
  if (window < 1) throw ConfigError("smoothing window must be at least 1");
  std::vector<double> out(series.size());
  double sum = 0.0;
  const auto w = static_cast<size_t>(window);
  for (size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= w) sum -= series[i - w];
    out[i] = sum / static_cast<double>(std::min(i + 1, w));
  }
  return out;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string num(double v) { return format_double(v); }

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string cell_name(const Cell& c) {
  return std::string(to_string(c.algo)) + "-" + std::string(env::to_string(c.reward));
}

struct FinalEval {
  double success_pct = 0.0;
  double correct_pct = 0.0;
  std::vector<int> success_lengths;
};

// Rows of final_eval.csv belonging to the best checkpoint.
FinalEval read_final_eval(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  if (line != "checkpoint,episode,success,correct,n_products,length")
    throw ConfigError(path.string() + " has an unexpected header");
  FinalEval f;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) c.push_back(cell);
    if (c.size() != 6) throw ConfigError(path.string() + " has a malformed row");
    if (c[0] != "best") continue;
    ++n;
    const bool success = c[2] == "1";
    const int products = std::stoi(c[4]);
    f.success_pct += success ? 100.0 : 0.0;
    f.correct_pct += products > 0 ? 100.0 * std::stoi(c[3]) / products : 0.0;
    if (success) f.success_lengths.push_back(std::stoi(c[5]));
  }
  if (n == 0) throw ConfigError(path.string() + " holds no best-checkpoint rows");
  f.success_pct /= n;
  f.correct_pct /= n;
  return f;
}

}  // namespace

MissingRun::MissingRun(std::vector<std::string> missing)
    : std::runtime_error("missing completed runs: " + join(missing)), missing_(std::move(missing)) {}

std::vector<Cell> all_cells() {
  return {{Algo::dqn, env::RewardVariant::r1},
          {Algo::dqn, env::RewardVariant::r2},
          {Algo::ppo, env::RewardVariant::r1},
          {Algo::ppo, env::RewardVariant::r2}};
}

Spread spread(const std::vector<double>& values) {
  Spread s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

ComparisonReport compare(const fs::path& root, const std::vector<Cell>& cells,
                         const std::vector<std::uint64_t>& seeds, const fs::path& report_dir, int window) {
  if (window < 1) throw ConfigError("smoothing window must be at least 1");
  if (cells.empty() || seeds.empty()) throw ConfigError("nothing to compare");
  std::vector<std::string> missing;
  for (const auto& cell : cells) {
    for (auto seed : seeds) {
      const auto dir = seed_dir(cell_dir(root, cell.algo, cell.reward), seed);
      bool ok = false;
      try {
        ok = read_json_file(dir / "manifest.json").value("status", "") == "complete" &&
             fs::exists(dir / "evals.csv") && fs::exists(dir / "final_eval.csv");
      } catch (const std::exception&) {
      }
      if (!ok) missing.push_back(cell_name(cell) + "/seed-" + std::to_string(seed));
    }
  }
  if (!missing.empty()) throw MissingRun(missing);

  ComparisonReport report;
  report.window = window;
  std::string curves = "algo,reward,episode,success_mean,success_std,correct_mean,correct_std\n";
  std::string bars = "algo,reward,seeds,success_mean,success_std,correct_mean,correct_std\n";
  std::string lengths = "algo,reward,seed,length\n";
  for (const auto& cell : cells) {
    const auto cdir = cell_dir(root, cell.algo, cell.reward);
    const std::string prefix = std::string(to_string(cell.algo)) + "," + std::string(env::to_string(cell.reward));
    CellReport row;
    row.cell = cell;
    row.seeds = seeds;
    row.single_seed = seeds.size() == 1;

    std::vector<std::vector<double>> succ, corr;
    std::vector<int> episodes;
    std::vector<double> s_pct, c_pct, lens;
    for (auto seed : seeds) {
      const auto dir = seed_dir(cdir, seed);
      const auto evals = parse_evals_csv(read_text(dir / "evals.csv"));
      std::vector<double> s, c;
      std::vector<int> eps;
      for (const auto& e : evals) {
        s.push_back(e.stats.success_pct);
        c.push_back(e.stats.correct_pct);
        eps.push_back(e.episode);
      }
      if (episodes.empty()) episodes = eps;
      if (eps != episodes) throw ConfigError(dir.string() + " has evaluation points unlike the other seeds");
      succ.push_back(smooth(s, window));
      corr.push_back(smooth(c, window));

      const auto f = read_final_eval(dir / "final_eval.csv");
      s_pct.push_back(f.success_pct);
      c_pct.push_back(f.correct_pct);
      if (!f.success_lengths.empty()) {
        double sum = 0.0;
        for (int l : f.success_lengths) {
          sum += l;
          lengths += prefix + "," + std::to_string(seed) + "," + std::to_string(l) + "\n";
        }
        lens.push_back(sum / static_cast<double>(f.success_lengths.size()));
      }
    }
    for (size_t k = 0; k < episodes.size(); ++k) {
      std::vector<double> sv, cv;
      for (size_t i = 0; i < succ.size(); ++i) {
        sv.push_back(succ[i][k]);
        cv.push_back(corr[i][k]);
      }
      const auto ss = spread(sv);
      const auto cs = spread(cv);
      curves += prefix + "," + std::to_string(episodes[k]) + "," + num(ss.mean) + "," + num(ss.std) + "," +
                num(cs.mean) + "," + num(cs.std) + "\n";
    }
    row.success_pct = spread(s_pct);
    row.correct_pct = spread(c_pct);
    row.seeds_with_success = static_cast<int>(lens.size());
    if (!lens.empty()) row.success_length = spread(lens);
    bars += prefix + "," + std::to_string(seeds.size()) + "," + num(row.success_pct.mean) + "," +
            num(row.success_pct.std) + "," + num(row.correct_pct.mean) + "," + num(row.correct_pct.std) + "\n";
    report.rows.push_back(row);
  }

  fs::create_directories(report_dir);
  write_file_atomic(report_dir / "curves.csv", curves);
  write_file_atomic(report_dir / "bars.csv", bars);
  write_file_atomic(report_dir / "lengths.csv", lengths);
  write_file_atomic(report_dir / "summary.json", to_json(report).dump(2) + "\n");
  return report;
}

json to_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j{{"algo", to_string(r.cell.algo)},
           {"reward", env::to_string(r.cell.reward)},
           {"seeds", r.seeds},
           {"success_pct", {{"mean", r.success_pct.mean}, {"std", r.success_pct.std}}},
           {"correct_pct", {{"mean", r.correct_pct.mean}, {"std", r.correct_pct.std}}},
           {"seeds_with_success", r.seeds_with_success},
           {"single_seed", r.single_seed}};
    j["success_length_ticks"] =
        r.success_length ? json{{"mean", r.success_length->mean}, {"std", r.success_length->std}} : json(nullptr);
    rows.push_back(j);
  }
  return json{{"window", report.window}, {"checkpoint", "best"}, {"rows", rows}};
}

}  // namespace sortline::harness
