#pragma once

#include <vector>

#include "buridan/error.hpp"

namespace buridan {

/// Discrete state per sample, each in [0, n_states).
struct StateSequence {
  std::vector<int> states;
  int n_states = 2;

  StateSequence() = default;
  StateSequence(std::vector<int> s, int n) : states(std::move(s)), n_states(n) {
    require(n_states >= 1, ErrorKind::InvalidParameters, "state sequence needs at least one state");
    for (int s_t : states)
      require(s_t >= 0 && s_t < n_states, ErrorKind::InvalidParameters, "state index out of range");
  }

  std::size_t size() const { return states.size(); }
  int operator[](std::size_t t) const { return states[t]; }
};

}  // namespace buridan
