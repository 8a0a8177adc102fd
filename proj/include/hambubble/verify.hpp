#pragma once

// Identity, positivity and oracle checks on a solved bubble.

#include <string>
#include <vector>

#include "hambubble/bubble.hpp"

namespace hambubble {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool pass = false;
};

struct VerifyOptions {
  double quad_rel_tol = 1e-12;
};

/// ODE residual, mass equality, identity and decomposition residuals, lambda independence,
/// positivity of c2 and c4, corrector decay slopes and Neumann residual, the c3 cross-check,
/// stationarity of Theta and, for p = q, the closed-form bubble.
VerificationReport verify_bubble(const BubbleSolution& sol, const VerifyOptions& opt = {});

}  // namespace hambubble
