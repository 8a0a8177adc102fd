#pragma once

// Quadrature and small numerical helpers shared by the modules.

#include <functional>
#include <span>
#include <vector>

namespace hambubble {

/// Surface measure of the unit k-sphere in R^{k+1}: 2 pi^{(k+1)/2} / Gamma((k+1)/2).
double sphere_measure(int k);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

struct QuadOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  int max_subdivisions = 2000;
};

/// Globally adaptive Gauss-Kronrod 7-15 on [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});

/// Adaptive integration over consecutive panels [breaks[i], breaks[i+1]].
/// Panels are summed in order, so the result does not depend on scheduling.
QuadResult integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks,
                            const QuadOptions& opt = {});

/// Integral over [a, inf) through the substitution x = a + u/(1-u).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, const QuadOptions& opt = {});

/// Finite-difference weights for the m-th derivative at x0 on arbitrary nodes.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m);

}  // namespace hambubble
