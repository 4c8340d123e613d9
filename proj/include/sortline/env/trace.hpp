#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>

#include "sortline/env/environment.hpp"

namespace sortline::env {

/// One StepResult as a single JSON-lines record.
nlohmann::json step_to_json(int step, int action, const StepResult& r);

class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void write(int action, const StepResult& r);
  void reset() { step_ = 0; }

 private:
  std::ostream& out_;
  int step_ = 0;
};

}  // namespace sortline::env
