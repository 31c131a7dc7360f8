#pragma once

#include <stdexcept>
#include <string>

namespace qwadv {

// Graph sampler exhausted its redraw budget without an acceptable draw.
struct generation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical integration left its validity envelope (trace drift, bad step).
struct integration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
struct divergence_error : std::runtime_error {
  divergence_error(const std::string& what, int epoch_index)
      : std::runtime_error(what), epoch(epoch_index) {}
  int epoch;
};

}  // namespace qwadv
