#include "hambubble/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hambubble/constants.hpp"
#include "hambubble/errors.hpp"
#include "hambubble/halfspace.hpp"
#include "hambubble/reduced_energy.hpp"

namespace hambubble {

namespace {

void add(VerificationReport& r, std::string name, double value, double threshold, std::string detail = {}) {
  r.checks.push_back({std::move(name), value, threshold, std::isfinite(value) && value <= threshold, std::move(detail)});
}

void add_flag(VerificationReport& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, ok, std::move(detail)});
}

}  // namespace

VerificationReport verify_bubble(const BubbleSolution& sol, const VerifyOptions& opt) {
  VerificationReport rep;
  const ExponentPair& pair = sol.pair;
  const int N = pair.N;
  add(rep, "ode_residual", sol.ode_residual, 1e-8);

  const EnergyConstants ec = energy_constants(sol, std::nullopt, opt.quad_rel_tol);
  add(rep, "mass_equality", std::abs(ec.S_pow - ec.S_pow_V) / ec.S_pow, 1e-6, "|int U^{p+1} - int V^{q+1}| relative");
  add(rep, "identity_residual", ec.identity_residual, 1e-5, "|C1 - C2 - C3 + C4| / max Ci");
  const IdentityCheck id = identity_check(sol, opt.quad_rel_tol);
  add(rep, "decomposition_residual", id.decomposition_residual, 1e-5);

  const auto [lo, hi] = lambda_window(pair);
  const double cmax = std::max({ec.C1, ec.C2, ec.C3, ec.C4});
  double slope = 0.0;
  for (int i = 1; i < 8; ++i) {
    for (int k = i + 1; k < 8; ++k) {
      const double l1 = lo + (hi - lo) * i / 8.0;
      const double l2 = lo + (hi - lo) * k / 8.0;
      slope = std::max(slope, std::abs(c4_at(ec, l1) - c4_at(ec, l2)) / (cmax * std::abs(l1 - l2)));
    }
  }
  add(rep, "c4_lambda_independence", slope, 1e-5, "max |c4(l1) - c4(l2)| / (max Ci |l1 - l2|) over the window");
  {
    std::ostringstream d;
    d << "c2 = " << ec.c2 << ", c4 = " << ec.c4;
    add_flag(rep, "positivity", ec.c2 > 0.0 && ec.c4 > 0.0, d.str());
  }

  QuadricBoundaryData rho;
  rho.rho = Eigen::VectorXd::Constant(N - 1, 0.5);
  for (const auto kind : {CorrectorKind::phi0, CorrectorKind::psi0}) {
    const CorrectorField field(sol, rho, kind);
    const DecayFit fit = decay_fit(field);
    add(rep, std::string("decay_slope_") + to_string(kind), fit.inconclusive ? NAN : std::abs(fit.slope - fit.expected),
        0.1, "slope " + std::to_string(fit.slope) + " against " + std::to_string(fit.expected));
    if (kind == CorrectorKind::phi0) {
      std::vector<Eigen::VectorXd> probes;
      for (double r : {0.5, 1.0, 2.0, 4.0}) probes.push_back(r * Eigen::VectorXd::Unit(N - 1, 0));
      add(rep, "neumann_residual", neumann_residual(field, probes), 1e-3);
    }
  }
  add(rep, "c3_crosscheck", c3_crosscheck(sol, rho).relative_difference, 1e-3);

  const ReducedConstants rc = reduced_constants(ec, pair, ec.lambda_used);
  const StationaryScale st = d_star(rc, -1.0);
  const double h = 1e-3 * st.d0;
  const double nodes[] = {st.d0 - 2 * h, st.d0 - h, st.d0 + h, st.d0 + 2 * h};
  const double w[] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
  double deriv = 0.0;
  for (int i = 0; i < 4; ++i) deriv += w[i] * theta(rc, -1.0, nodes[i]) / h;
  add(rep, "stationarity", std::abs(deriv) / std::abs(st.theta_at_d0), 1e-10, "d Theta / d d at d0 with H = -1");

  if (pair.p == pair.q) {
    const double c = N * (N - 2.0);
    double sup = 0.0;
    for (int i = 0; i <= 5000; ++i) {
      const double r = 50.0 * i / 5000.0;
      sup = std::max(sup, std::abs(sol.at(r).U - std::pow(1.0 + r * r / c, -(N - 2) / 2.0)));
    }
    add(rep, "symmetric_oracle_profile", sup, 1e-6, "sup |U - closed form| on [0, 50]");
    add(rep, "symmetric_oracle_beta", std::abs(sol.beta_star - 1.0), 1e-8, "|beta* - 1|");
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.pass; });
  return rep;
}

}  // namespace hambubble
