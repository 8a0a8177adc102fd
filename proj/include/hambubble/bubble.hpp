#pragma once

// Radial ground state (U, V) of -Delta U = V^q, -Delta V = U^p on R^N with U(0) = 1,
// found by shooting on beta = V(0), plus tail fits and scaled-bubble evaluation.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hambubble/hyperbola.hpp"

namespace hambubble {

inline constexpr double kDefaultRMax = 1e3;
inline constexpr double kGridRatio = 1.005;

/// Node 0 sits at r = 0; the rest form a geometric grid ending exactly at r_max.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> U;
  std::vector<double> V;
  std::vector<double> dU;
  std::vector<double> dV;

  std::size_t size() const { return r.size(); }
  double r_max() const { return r.back(); }
};

/// U ~ b r^{-kU} exp(cU r^{-eU}), V ~ a r^{-kV} exp(cV r^{-eV}) for large r.
struct TailCoefficients {
  double a = 0.0;
  double b = 0.0;
  double gamma = 0.0;
  DecayRegime regime = DecayRegime::q_above;
  double kU = 0.0;
  double kV = 0.0;
  double eU = 0.0;
  double eV = 0.0;
  double cU = 0.0;
  double cV = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  /// Largest relative spread of the corrected local constants over the window.
  double fit_variation = 0.0;
  /// Exponents from a fit where the power is left free.
  double fitted_kU = 0.0;
  double fitted_kV = 0.0;
};

enum class Crossing { U_first, V_first };
const char* to_string(Crossing c);

struct ShootingRecord {
  double beta = 0.0;
  Crossing crossing = Crossing::U_first;
  /// Radius of the zero crossing, or r_max when the far-field indicator decided.
  double radius = 0.0;
  bool by_indicator = false;
};

struct SolverMeta {
  double tol = 0.0;
  double rtol = 0.0;
  double r_max = 0.0;
  double r_start = 0.0;
  double grid_ratio = kGridRatio;
  long steps = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<ShootingRecord> trace;
  /// Sorted by beta, the trace changes class exactly once.
  bool dichotomy_ok = false;
};

struct RadialSample {
  double U = 0.0;
  double V = 0.0;
  double dU = 0.0;
  double dV = 0.0;
};

struct BubbleSolution {
  ExponentPair pair;
  double beta_star = 0.0;
  RadialProfile profile;
  TailCoefficients tail;
  double ode_residual = 0.0;
  SolverMeta meta;

  /// Cubic Hermite interpolation on the grid, fitted tails beyond r_max.
  RadialSample at(double r) const;
};

/// Ground state by shooting. tol in [1e-14, 1e-6].
BubbleSolution solve_ground_state(const ExponentPair& pair, double tol = 1e-10, double r_max = kDefaultRMax);

/// U = V = (1 + r^2/(N(N-2)))^{-(N-2)/2}, sampled on the solver's default grid.
BubbleSolution closed_form_symmetric(int N, double r_max = kDefaultRMax);

/// Geometric grid used for stored profiles (r = 0 prepended).
std::vector<double> profile_grid(double r_start, double r_max, double ratio = kGridRatio);

TailCoefficients extract_tail(const RadialProfile& profile, const ExponentPair& pair);

/// Max normalized ODE residual over grid nodes with r <= r_hi.
double ode_residual(const BubbleSolution& sol, double r_hi = -1.0);

struct LogDerivativeLimits {
  double limU = 0.0;
  double limV = 0.0;
  double expectedU = 0.0;
  double expectedV = 0.0;
  /// Nominal limit 1, reported next to the fitted values.
  double nominal = 1.0;
  bool consistent = false;
};

LogDerivativeLimits log_derivative_check(const BubbleSolution& sol);

/// u = delta^{-N/(p+1)} U(|x - xi|/delta), v = delta^{-N/(q+1)} V(|x - xi|/delta).
struct ScaledBubble {
  const BubbleSolution* base = nullptr;
  double delta = 1.0;
  Eigen::VectorXd xi;

  ScaledBubble(const BubbleSolution& sol, double delta, Eigen::VectorXd xi);
};

std::pair<double, double> evaluate_scaled(const ScaledBubble& sb, const Eigen::VectorXd& x);

/// i = 0: delta-derivative. i >= 1: derivative in xi along frame column i-1.
/// frame is N x (N-1) with orthonormal columns.
std::pair<double, double> derivative_bubbles(const ScaledBubble& sb, int i, const Eigen::MatrixXd& frame,
                                             const Eigen::VectorXd& x);

}  // namespace hambubble
