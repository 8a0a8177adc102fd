#include "hambubble/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hambubble/errors.hpp"

namespace hambubble {

namespace {

double checked(const QuadResult& r, const char* what) {
  if (!r.converged || !std::isfinite(r.value)) throw AccuracyError(std::string(what) + ": quadrature did not converge");
  return r.value;
}

}  // namespace

QuadratureSpec quadrature_spec(int N, double rel_tol) {
  QuadratureSpec s;
  s.rel_tol = rel_tol;
  s.sigma_Nm2 = sphere_measure(N - 2);
  s.sigma_Nm1 = sphere_measure(N - 1);
  return s;
}

QuadResult radial_integral(const BubbleSolution& sol, const std::function<double(double, const RadialSample&)>& f,
                           double rel_tol) {
  auto g = [&](double r) { return f(r, sol.at(r)); };
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  const auto& grid = sol.profile.r;
  QuadResult inner = integrate_panels(g, grid, opt);
  const double r_max = sol.profile.r_max();
  auto tail = [&](double u) {
    const double r = r_max * std::exp(u);
    if (r > 1e150) return 0.0;
    // Far out the power factors overflow while the profile underflows.
    const double v = g(r) * r;
    return std::isfinite(v) ? v : 0.0;
  };
  QuadOptions topt = opt;
  topt.abs_tol = rel_tol * std::abs(inner.value);
  const QuadResult outer = integrate_to_infinity(tail, 0.0, topt);
  inner.value += outer.value;
  inner.error += outer.error;
  inner.evaluations += outer.evaluations;
  inner.converged = inner.converged && outer.converged;
  return inner;
}

double sobolev_mass(const BubbleSolution& sol, double rel_tol) {
  const int N = sol.pair.N;
  const double p = sol.pair.p;
  const QuadResult r = radial_integral(
      sol, [&](double x, const RadialSample& s) { return std::pow(x, N - 1) * std::pow(s.U, p + 1.0); }, rel_tol);
  return sphere_measure(N - 1) * checked(r, "sobolev_mass");
}

double sobolev_mass_v(const BubbleSolution& sol, double rel_tol) {
  const int N = sol.pair.N;
  const double q = sol.pair.q;
  const QuadResult r = radial_integral(
      sol, [&](double x, const RadialSample& s) { return std::pow(x, N - 1) * std::pow(s.V, q + 1.0); }, rel_tol);
  return sphere_measure(N - 1) * checked(r, "sobolev_mass_v");
}

BoundaryConstants boundary_constants(const BubbleSolution& sol, double rel_tol) {
  const int N = sol.pair.N;
  const double p = sol.pair.p;
  const double q = sol.pair.q;
  const double half = 0.5 * sphere_measure(N - 2);
  BoundaryConstants c;
  c.C1 = half * checked(radial_integral(
                            sol, [&](double r, const RadialSample& s) { return std::pow(r, N) * std::pow(s.U, p + 1.0); },
                            rel_tol),
                        "C1");
  c.C2 = half * checked(radial_integral(
                            sol, [&](double r, const RadialSample& s) { return std::pow(r, N) * std::pow(s.V, q + 1.0); },
                            rel_tol),
                        "C2");
  c.C3 = -half * checked(radial_integral(
                             sol, [&](double r, const RadialSample& s) { return std::pow(r, N - 1) * s.dU * s.V; },
                             rel_tol),
                         "C3");
  c.C4 = -half * checked(radial_integral(
                             sol, [&](double r, const RadialSample& s) { return std::pow(r, N - 1) * s.dV * s.U; },
                             rel_tol),
                         "C4");
  return c;
}

IdentityCheck identity_check(const BubbleSolution& sol, double rel_tol) {
  const int N = sol.pair.N;
  const BoundaryConstants c = boundary_constants(sol, rel_tol);
  IdentityCheck out;
  const double top = std::max({c.C1, c.C2, c.C3, c.C4});
  out.residual = std::abs(c.C1 - c.C2 - c.C3 + c.C4) / top;
  out.terms[0] = N * (N - 1.0) *
                 checked(radial_integral(
                             sol, [&](double r, const RadialSample& s) { return std::pow(r, N - 2) * s.U * s.V; },
                             rel_tol),
                         "identity term 1");
  out.terms[1] = N * checked(radial_integral(
                                 sol, [&](double r, const RadialSample& s) { return std::pow(r, N - 1) * s.dU * s.V; },
                                 rel_tol),
                             "identity term 2");
  out.terms[2] = N * checked(radial_integral(
                                 sol, [&](double r, const RadialSample& s) { return std::pow(r, N - 1) * s.U * s.dV; },
                                 rel_tol),
                             "identity term 3");
  const double biggest = std::max({std::abs(out.terms[0]), std::abs(out.terms[1]), std::abs(out.terms[2])});
  out.decomposition_residual = std::abs(out.terms[0] + out.terms[1] + out.terms[2]) / biggest;
  return out;
}

LogConstants log_constants(const BubbleSolution& sol, double rel_tol) {
  const int N = sol.pair.N;
  const double p = sol.pair.p;
  const double q = sol.pair.q;
  const double half = 0.5 * sphere_measure(N - 1);
  LogConstants c;
  c.C5 = half * checked(radial_integral(
                            sol,
                            [&](double r, const RadialSample& s) {
                              return std::pow(r, N - 1) * std::pow(s.U, p + 1.0) * std::log(s.U);
                            },
                            rel_tol),
                        "C5");
  c.C6 = half * checked(radial_integral(
                            sol,
                            [&](double r, const RadialSample& s) {
                              return std::pow(r, N - 1) * std::pow(s.V, q + 1.0) * std::log(s.V);
                            },
                            rel_tol),
                        "C6");
  return c;
}

std::pair<double, double> lambda_window(const ExponentPair& pair) {
  return {1.0 / (pair.p + 1.0), pair.q / (pair.q + 1.0)};
}

double c4_at(const EnergyConstants& ec, double lambda) {
  return ec.C1 * (lambda - 1.0 / (ec.p + 1.0)) + ec.C2 * (1.0 - lambda - 1.0 / (ec.q + 1.0)) +
         (1.0 - lambda) * ec.C3 + lambda * ec.C4;
}

ReducedConstants reduced_constants(const EnergyConstants& ec, const ExponentPair& pair, double lambda) {
  const auto [lo, hi] = lambda_window(pair);
  if (!(lambda > lo && lambda < hi)) {
    std::ostringstream msg;
    msg << "reduced_constants: lambda = " << lambda << " outside the positivity window (" << lo << ", " << hi << ")";
    throw DomainError(msg.str());
  }
  const double p = pair.p;
  const double q = pair.q;
  const double w = 1.0 / ((p + 1.0) * (p + 1.0)) + 1.0 / ((q + 1.0) * (q + 1.0));
  ReducedConstants r;
  r.lambda = lambda;
  r.c1 = ec.S_pow / pair.N;
  r.c2 = 0.5 * pair.N * ec.S_pow * w;
  r.c3 = ec.C5 / (p + 1.0) + ec.C6 / (q + 1.0) - 0.5 * ec.S_pow * w;
  r.c4 = c4_at(ec, lambda);
  if (!(r.c2 > 0.0) || !(r.c4 > 0.0)) throw AccuracyError("reduced_constants: c2 and c4 must be positive");
  return r;
}

EnergyConstants energy_constants(const BubbleSolution& sol, std::optional<double> lambda, double rel_tol) {
  EnergyConstants ec;
  ec.N = sol.pair.N;
  ec.p = sol.pair.p;
  ec.q = sol.pair.q;
  ec.quadrature = quadrature_spec(ec.N, rel_tol);
  ec.S_pow = sobolev_mass(sol, rel_tol);
  ec.S_pow_V = sobolev_mass_v(sol, rel_tol);
  const BoundaryConstants b = boundary_constants(sol, rel_tol);
  ec.C1 = b.C1;
  ec.C2 = b.C2;
  ec.C3 = b.C3;
  ec.C4 = b.C4;
  const LogConstants l = log_constants(sol, rel_tol);
  ec.C5 = l.C5;
  ec.C6 = l.C6;
  ec.identity_residual = std::abs(b.C1 - b.C2 - b.C3 + b.C4) / std::max({b.C1, b.C2, b.C3, b.C4});
  const auto [lo, hi] = lambda_window(sol.pair);
  const ReducedConstants r = reduced_constants(ec, sol.pair, lambda.value_or(0.5 * (lo + hi)));
  ec.c1 = r.c1;
  ec.c2 = r.c2;
  ec.c3 = r.c3;
  ec.c4 = r.c4;
  ec.lambda_used = r.lambda;
  return ec;
}

}  // namespace hambubble
