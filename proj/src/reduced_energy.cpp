#include "hambubble/reduced_energy.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <thread>

#include "hambubble/errors.hpp"

namespace hambubble {

namespace {

void check_positive_constants(const ReducedConstants& c) {
  if (!(c.c2 > 0.0) || !(c.c4 > 0.0)) throw DomainError("reduced energy: requires c2 > 0 and c4 > 0");
}

HypothesesSnapshot snapshot(const ExponentPair& pair) {
  HypothesesSnapshot h;
  h.ok = theorem_hypotheses(pair, &h.violated);
  h.threshold_q = threshold_q(pair.N);
  try {
    h.sigma = remainder_ledger(pair).sigma;
  } catch (const Error& e) {
    if (h.ok) {
      h.ok = false;
      h.violated = e.what();
    }
  }
  return h;
}

}  // namespace

double theta(const ReducedConstants& c, double H, double d) {
  if (!(d > 0.0)) throw DomainError("theta: d must be positive");
  return -c.c4 * H * d - c.c2 * std::log(d);
}

StationaryScale d_star(const ReducedConstants& c, double H) {
  check_positive_constants(c);
  if (!(H < 0.0)) {
    throw DomainError(
        "d_star: Theta(., xi) has no critical point for H >= 0; with both exponents lowered the "
        "eps ln(delta) coefficient is negative, so concentration needs H < 0");
  }
  StationaryScale s;
  s.d0 = -c.c2 / (c.c4 * H);
  s.theta_at_d0 = theta(c, H, s.d0);
  s.theta_dd = c.c2 / (s.d0 * s.d0);
  return s;
}

double reduced_energy_eval(const ReducedConstants& c, double eps, double d, double H) {
  if (!(eps > 0.0 && eps <= 0.1)) throw DomainError("reduced_energy_eval: eps must lie in (0, 0.1]");
  return c.c1 - c.c2 * eps * std::log(eps) + c.c3 * eps + theta(c, H, d) * eps;
}

BlowupPrediction predict_blowup(const BoundarySurface& surface, const ReducedConstants& c, const ExponentPair& pair,
                                const std::vector<double>& eps_list, const PredictOptions& opt) {
  const HypothesesSnapshot h = snapshot(pair);
  if (!h.ok) throw RefusalError("predict: theorem hypothesis violated: " + h.violated);
  if (surface.dimension() != pair.N) throw DomainError("predict: surface dimension differs from N");
  return predict_blowup(find_critical_points(surface, opt.seeds), c, pair, eps_list, opt);
}

BlowupPrediction predict_blowup(const CriticalSearch& search, const ReducedConstants& c, const ExponentPair& pair,
                                const std::vector<double>& eps_list, const PredictOptions& opt) {
  BlowupPrediction out;
  out.hypotheses = snapshot(pair);
  if (!out.hypotheses.ok) throw RefusalError("predict: theorem hypothesis violated: " + out.hypotheses.violated);
  check_positive_constants(c);
  if (!(opt.mu > 0.0)) throw DomainError("predict: mu must be positive");
  for (double e : eps_list) {
    if (!(e > 0.0 && e <= 0.1)) throw DomainError("predict: every eps must lie in (0, 0.1]");
  }
  int negative = 0;
  for (const auto& cp : search.points) {
    if (cp.report.H < 0.0) {
      ++negative;
      if (cp.report.nondegenerate) out.candidates.push_back(cp);
    }
  }
  if (out.candidates.empty()) {
    if (search.points.empty()) throw RefusalError("predict: no critical point of H was found on the boundary");
    if (negative == 0) {
      throw RefusalError("predict: every critical point of H has H >= 0; blow-up needs a critical point with H(xi0) < 0");
    }
    throw RefusalError("predict: the critical points with H < 0 are degenerate; blow-up needs a nondegenerate one");
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const CriticalPoint& a, const CriticalPoint& b) {
                     return std::llround(a.report.H * 1e9) < std::llround(b.report.H * 1e9);
                   });
  const std::size_t pick = opt.select.value_or(0);
  if (pick >= out.candidates.size()) throw DomainError("predict: candidate index out of range");
  out.xi0 = out.candidates[pick];
  out.H0 = out.xi0.report.H;
  const StationaryScale s = d_star(c, out.H0);
  out.d0 = s.d0;
  out.theta_at_d0 = s.theta_at_d0;
  out.theta_dd = s.theta_dd;
  for (double e : eps_list) out.delta_samples.emplace_back(e, out.d0 * e);
  out.regime = regime_sign(-1, -1, pair.p, pair.q);
  out.mu = opt.mu;
  out.constants = c;
  if (!out.xi0.minimum) out.notes.push_back("selected point is a nondegenerate critical point but not a minimum of H");
  out.notes.push_back("reduced energy truncated after the eps-order term");
  return out;
}

AnsatzField ansatz_field(const BlowupPrediction& pred, const BubbleSolution& sol, const QuadricBoundaryData& rho,
                         double eps, const std::vector<Eigen::VectorXd>& points) {
  const int N = sol.pair.N;
  if (!(eps > 0.0 && eps <= 0.1)) throw DomainError("ansatz_field: eps must lie in (0, 0.1]");
  if (rho.rho.size() != N - 1) throw DomainError("ansatz_field: rho must have N-1 entries");
  if (rho.frame.rows() != N || rho.frame.cols() != N - 1 || rho.normal.size() != N) {
    throw DomainError("ansatz_field: rho needs its tangent frame and inward normal");
  }
  const Eigen::VectorXd& xi0 = pred.xi0.point.x;
  if (xi0.size() != N) throw DomainError("ansatz_field: prediction dimension differs from the bubble");
  AnsatzField out;
  out.delta = pred.d0 * eps;
  const double kmax = 2.0 * rho.rho.cwiseAbs().maxCoeff();
  out.chart_radius = kmax > 0.0 ? 0.5 / kmax : 1.0;
  const CorrectorField phi0(sol, rho, CorrectorKind::phi0);
  const CorrectorField psi0(sol, rho, CorrectorKind::psi0);
  out.order = expansion_order(sol.pair);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Eigen::VectorXd& x = points[k];
    if (x.size() != N) throw DomainError("ansatz_field: sample point has the wrong dimension");
    const Eigen::VectorXd z = x - xi0;
    if (z.norm() > out.chart_radius) {
      out.notes.push_back("sample " + std::to_string(k) + " skipped: outside the chart radius");
      continue;
    }
    const Eigen::VectorXd y = rho.frame.transpose() * z;
    const double t = rho.normal.dot(z) - (rho.rho.array() * y.array().square()).sum();
    if (t < 0.0) {
      out.notes.push_back("sample " + std::to_string(k) + " skipped: outside the domain in the chart");
      continue;
    }
    AnsatzSample s;
    s.x = x;
    s.chart.resize(N);
    s.chart << y, t;
    const TwoTermValue v = two_term_expansion(phi0, psi0, out.delta, s.chart);
    s.u = v.u_approx;
    s.v = v.v_approx;
    s.u_bubble = v.u_bubble;
    s.v_bubble = v.v_bubble;
    out.samples.push_back(std::move(s));
  }
  return out;
}

ThetaLandscape landscape(const BoundarySurface& surface, const ReducedConstants& c, const Eigen::VectorXd& center,
                         double half_width, int n_chart, double d_lo, double d_hi, int n_d) {
  if (!(d_lo > 0.0 && d_hi > d_lo) || n_d < 2) throw DomainError("landscape: need 0 < d_lo < d_hi and n >= 2");
  if (!(half_width >= 0.0) || n_chart < 1) throw DomainError("landscape: need half_width >= 0 and n_chart >= 1");
  const int m = surface.dimension() - 1;
  const SurfacePoint base = project_to_surface(surface, center);
  ThetaLandscape L;
  for (int k = 0; k < n_d; ++k) L.d.push_back(d_lo * std::pow(d_hi / d_lo, static_cast<double>(k) / (n_d - 1)));
  long total = 1;
  for (int j = 0; j < m; ++j) total *= n_chart;
  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd y(m);
    long rem = idx;
    for (int j = m - 1; j >= 0; --j) {
      const int i = static_cast<int>(rem % n_chart);
      rem /= n_chart;
      y[j] = n_chart == 1 ? 0.0 : -half_width + 2.0 * half_width * i / (n_chart - 1);
    }
    L.chart.push_back(y);
  }
  L.points.resize(total);
  L.H.resize(total);
  const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (long i = w; i < total; i += workers) {
        L.points[i] = chart_point(surface, base, L.chart[i]);
        L.H[i] = principal_curvatures(surface, L.points[i]).H;
      }
    }));
  }
  for (auto& j : jobs) j.get();
  L.theta.resize(total, n_d);
  for (long i = 0; i < total; ++i) {
    for (int k = 0; k < n_d; ++k) L.theta(i, k) = theta(c, L.H[i], L.d[k]);
    if (L.H[i] < 0.0 && (!L.minimum_node || L.H[i] < L.H[*L.minimum_node])) L.minimum_node = i;
  }
  if (L.minimum_node && c.c2 > 0.0 && c.c4 > 0.0) {
    const StationaryScale s = d_star(c, L.H[*L.minimum_node]);
    L.minimum_d0 = s.d0;
    L.minimum_theta = s.theta_at_d0;
  }
  return L;
}

void write_landscape_csv(const ThetaLandscape& L, std::ostream& out) {
  const long m = L.chart.empty() ? 0 : L.chart.front().size();
  out << "d";
  for (long j = 0; j < m; ++j) out << ",y" << j + 1;
  out << ",H,theta\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < L.chart.size(); ++i) {
    for (std::size_t k = 0; k < L.d.size(); ++k) {
      out << L.d[k];
      for (long j = 0; j < m; ++j) out << ',' << L.chart[i][j];
      out << ',' << L.H[i] << ',' << L.theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) << '\n';
    }
  }
  out.precision(old);
}

}  // namespace hambubble
