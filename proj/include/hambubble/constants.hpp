#pragma once

// Energy-expansion constants of the bubble: the Sobolev mass, the boundary
// constants C1..C4, the logarithmic constants C5, C6 and the reduced constants c1..c4.

#include <string>

#include "hambubble/bubble.hpp"
#include "hambubble/quadrature.hpp"

namespace hambubble {

struct QuadratureSpec {
  std::string method = "gauss-kronrod 7-15 on grid panels";
  std::string tail_mode = "fitted power tail on [r_max, inf) via r = r_max e^u";
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  double sigma_Nm2 = 0.0;  // unit (N-2)-sphere
  double sigma_Nm1 = 0.0;  // unit (N-1)-sphere
};

QuadratureSpec quadrature_spec(int N, double rel_tol = 1e-12);

/// int_0^inf f(r, sample(r)) dr over the stored profile plus its tail.
QuadResult radial_integral(const BubbleSolution& sol, const std::function<double(double, const RadialSample&)>& f,
                           double rel_tol = 1e-12);

/// sigma_{N-1} int r^{N-1} U^{p+1}.
double sobolev_mass(const BubbleSolution& sol, double rel_tol = 1e-12);
/// sigma_{N-1} int r^{N-1} V^{q+1}; equal to sobolev_mass for a true solution.
double sobolev_mass_v(const BubbleSolution& sol, double rel_tol = 1e-12);

struct BoundaryConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
};

BoundaryConstants boundary_constants(const BubbleSolution& sol, double rel_tol = 1e-12);

struct IdentityCheck {
  /// |C1 - C2 - C3 + C4| / max(Ci).
  double residual = 0.0;
  /// N(N-1) int r^{N-2} UV, N int r^{N-1} U'V, N int r^{N-1} UV'.
  double terms[3] = {0.0, 0.0, 0.0};
  /// |sum of terms| / max |term|.
  double decomposition_residual = 0.0;
};

IdentityCheck identity_check(const BubbleSolution& sol, double rel_tol = 1e-12);

struct LogConstants {
  double C5 = 0.0;
  double C6 = 0.0;
};

LogConstants log_constants(const BubbleSolution& sol, double rel_tol = 1e-12);

struct EnergyConstants {
  int N = 0;
  double p = 0.0;
  double q = 0.0;
  double S_pow = 0.0;
  double S_pow_V = 0.0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0, C5 = 0.0, C6 = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double lambda_used = 0.0;
  double identity_residual = 0.0;
  QuadratureSpec quadrature;
};

/// Open interval (1/(p+1), q/(q+1)) where c4 is manifestly positive.
std::pair<double, double> lambda_window(const ExponentPair& pair);

struct ReducedConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double lambda = 0.0;
};

/// Requires lambda inside lambda_window(pair).
ReducedConstants reduced_constants(const EnergyConstants& ec, const ExponentPair& pair, double lambda);

/// c4 as an affine function of lambda, without the window check.
double c4_at(const EnergyConstants& ec, double lambda);

/// All constants; lambda defaults to the window midpoint.
EnergyConstants energy_constants(const BubbleSolution& sol, std::optional<double> lambda = std::nullopt,
                                 double rel_tol = 1e-12);

}  // namespace hambubble
