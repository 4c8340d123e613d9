#include "sortline/env/trace.hpp"

#include <ostream>

namespace sortline::env {

nlohmann::json step_to_json(int step, int action, const StepResult& r) {
  std::vector<int> obs(r.observation.begin(), r.observation.end());
  return {{"step", step},
          {"action", action},
          {"reward", r.reward},
          {"terminated", r.terminated},
          {"truncated", r.truncated},
          {"event", factory::to_string(r.info.event)},
          {"correct", r.info.products_correct},
          {"missorted", r.info.products_missorted},
          {"tick", r.info.tick},
          {"observation", obs}};
}

void TraceWriter::write(int action, const StepResult& r) {
  out_ << step_to_json(step_++, action, r).dump() << '\n';
}

}  // namespace sortline::env
