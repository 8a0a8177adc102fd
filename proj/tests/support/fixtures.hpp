#pragma once

// Ground states shared by the tests, solved once per process.

#include "hambubble/bubble.hpp"

namespace fixtures {

inline const hambubble::BubbleSolution& symmetric4() {
  static const hambubble::BubbleSolution s = hambubble::solve_ground_state(hambubble::critical_pair(4, 3, 3));
  return s;
}

inline const hambubble::BubbleSolution& pair_5_11_4() {
  static const hambubble::BubbleSolution s = hambubble::solve_ground_state(hambubble::critical_pair(5, 2.75, 2));
  return s;
}

inline const hambubble::BubbleSolution& pair_5_4() {
  static const hambubble::BubbleSolution s = hambubble::solve_ground_state(hambubble::critical_pair(5, 4, 1.5));
  return s;
}

}  // namespace fixtures
