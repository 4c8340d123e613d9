#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortline/harness/config.hpp"

namespace sortline::harness {

namespace fs = std::filesystem;

/// Trailing moving average; the first window-1 entries average over what
/// is available. Throws ConfigError when window < 1.
std::vector<double> smooth(const std::vector<double>& series, int window);

/// Cells or seeds without a completed run.
class MissingRun : public std::runtime_error {
 public:
  explicit MissingRun(std::vector<std::string> missing);
  [[nodiscard]] const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

struct Cell {
  Algo algo;
  env::RewardVariant reward;
};

/// All four algorithm and reward combinations.
std::vector<Cell> all_cells();

/// Mean and sample standard deviation (0 for a single value).
struct Spread {
  double mean = 0.0;
  double std = 0.0;
};
Spread spread(const std::vector<double>& values);

/// Aggregates of one cell over its seeds, from the 100-episode final
/// evaluation of each seed's best checkpoint.
struct CellReport {
  Cell cell;
  std::vector<std::uint64_t> seeds;
  Spread success_pct;
  Spread correct_pct;
  /// Over seeds with at least one success; empty if none had any.
  std::optional<Spread> success_length;
  int seeds_with_success = 0;
  bool single_seed = false;
};

struct ComparisonReport {
  std::vector<CellReport> rows;
  int window = kSmoothWindow;
};

/// Reads <root>/<algo>-<reward>/seed-<n> for every cell and seed and writes
/// into `report_dir`:
///   curves.csv   smoothed evaluation success and correct share, mean and
///                std over seeds, per evaluation point
///   bars.csv     final evaluation success and correct share per cell
///   lengths.csv  lengths of every successful final evaluation episode
///   summary.json the rows of the report
/// Throws MissingRun naming every absent seed run.
ComparisonReport compare(const fs::path& root, const std::vector<Cell>& cells,
                         const std::vector<std::uint64_t>& seeds, const fs::path& report_dir,
                         int window = kSmoothWindow);

nlohmann::json to_json(const ComparisonReport& report);

}  // namespace sortline::harness
