#include "hambubble/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hambubble/errors.hpp"
#include "hambubble/ode.hpp"
#include "hambubble/quadrature.hpp"

namespace hambubble {

namespace {

using State = Eigen::Vector4d;  // U, U', V, V'

struct Model {
  int N;
  double p;
  double q;

  State operator()(double r, const State& y) const {
    const double up = std::max(y[0], 0.0);
    const double vp = std::max(y[2], 0.0);
    State d;
    d << y[1], -(N - 1) / r * y[1] - std::pow(vp, q), y[3], -(N - 1) / r * y[3] - std::pow(up, p);
    return d;
  }
};

double start_radius(double beta, double q) {
  return 1e-2 * std::min({1.0, std::pow(beta, -0.5 * q), std::sqrt(beta)});
}

State series_start(const Model& m, double beta, double r) {
  const double N = m.N;
  const double bq = std::pow(beta, m.q);
  const double r2 = r * r;
  const double den = 8.0 * N * (N + 2.0);
  const double u2 = -bq / (2.0 * N);
  const double u4 = m.q * std::pow(beta, m.q - 1.0) / den;
  const double v2 = -1.0 / (2.0 * N);
  const double v4 = m.p * bq / den;
  State y;
  y << 1.0 + u2 * r2 + u4 * r2 * r2, 2.0 * u2 * r + 4.0 * u4 * r2 * r, beta + v2 * r2 + v4 * r2 * r2,
      2.0 * v2 * r + 4.0 * v4 * r2 * r;
  return y;
}

struct Trial {
  ShootingRecord record;
  long steps = 0;
};

Trial shoot(const Model& m, double beta, double rtol, double r_max) {
  const double r0 = start_radius(beta, m.q);
  State y = series_start(m, beta, r0);
  double r = r0;
  double h = 0.1 * r0;
  DormandPrince45<State> dp({.rtol = rtol, .atol = 1e-300});
  State prev = y;
  double r_prev = r;
  auto stop = [&](double t, const State& s) {
    if (s[0] <= 0.0 || s[2] <= 0.0) return true;
    prev = s;
    r_prev = t;
    return false;
  };
  const StepOutcome out = dp.advance(m, r, y, r_max, h, stop);
  Trial trial;
  trial.steps = dp.accepted() + dp.rejected();
  trial.record.beta = beta;
  if (out == StepOutcome::failed) throw SolverError("shooting: integrator failed at beta = " + std::to_string(beta));
  if (out == StepOutcome::stopped) {
    // Linear interpolation of both zero crossings inside the last step.
    auto crossing = [&](int i) {
      if (y[i] > 0.0) return std::numeric_limits<double>::infinity();
      return r_prev + (r - r_prev) * prev[i] / (prev[i] - y[i]);
    };
    const double ru = crossing(0);
    const double rv = crossing(2);
    trial.record.crossing = ru <= rv ? Crossing::U_first : Crossing::V_first;
    trial.record.radius = std::min(ru, rv);
  } else {
    // Far-field indicator V + r V'/(N-2): the coefficient of the constant mode.
    const double indicator = y[2] + r * y[3] / (m.N - 2.0);
    trial.record.crossing = indicator > 0.0 ? Crossing::U_first : Crossing::V_first;
    trial.record.radius = r_max;
    trial.record.by_indicator = true;
  }
  return trial;
}

double second_derivative(const Model& m, double r, double d1, double other) {
  const double forcing = std::pow(std::max(other, 0.0), m.q);
  if (r == 0.0) return -forcing / m.N;
  return -(m.N - 1) / r * d1 - forcing;
}

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd residual;
};

LinearFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  LinearFit f;
  f.coef = X.colPivHouseholderQr().solve(y);
  f.residual = y - X * f.coef;
  return f;
}

struct ComponentFit {
  double amplitude = 0.0;
  double correction = 0.0;
  double variation = 0.0;
  double free_exponent = 0.0;
};

ComponentFit fit_component(const std::vector<double>& r, const std::vector<double>& f, double k, double e,
                           double lo) {
  const int n = static_cast<int>(r.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::pow(r[i] / lo, -e);
    y[i] = std::log(f[i]) + k * std::log(r[i]);
  }
  const LinearFit fit = least_squares(X, y);
  ComponentFit out;
  out.amplitude = std::exp(fit.coef[0]);
  out.correction = fit.coef[1] * std::pow(lo, e);
  double lo_c = std::numeric_limits<double>::infinity();
  double hi_c = -lo_c;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = std::exp(y[i] - fit.coef[1] * X(i, 1));
    lo_c = std::min(lo_c, c);
    hi_c = std::max(hi_c, c);
    mean += c / n;
  }
  out.variation = (hi_c - lo_c) / mean;

  Eigen::MatrixXd Z(n, 3);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    Z(i, 0) = 1.0;
    Z(i, 1) = -std::log(r[i] / lo);
    Z(i, 2) = X(i, 1);
    w[i] = std::log(f[i]);
  }
  out.free_exponent = least_squares(Z, w).coef[1];
  return out;
}

double fit_limit(const std::vector<double>& r, const std::vector<double>& g, double e, double lo) {
  const int n = static_cast<int>(r.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::pow(r[i] / lo, -e);
    y[i] = g[i];
  }
  return least_squares(X, y).coef[0];
}

struct TailWindow {
  std::vector<double> r, U, V, dU, dV;
};

TailWindow tail_window(const RadialProfile& prof, double lo) {
  TailWindow w;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (prof.r[i] < lo) continue;
    w.r.push_back(prof.r[i]);
    w.U.push_back(prof.U[i]);
    w.V.push_back(prof.V[i]);
    w.dU.push_back(prof.dU[i]);
    w.dV.push_back(prof.dV[i]);
  }
  return w;
}

}  // namespace

const char* to_string(Crossing c) { return c == Crossing::U_first ? "U_first" : "V_first"; }

std::vector<double> profile_grid(double r_start, double r_max, double ratio) {
  if (!(r_start > 0.0) || !(r_max > r_start) || !(ratio > 1.0)) throw DomainError("profile_grid: bad grid spec");
  const int n = static_cast<int>(std::ceil(std::log(r_max / r_start) / std::log(ratio)));
  std::vector<double> grid;
  grid.reserve(n + 2);
  grid.push_back(0.0);
  for (int i = 0; i < n; ++i) grid.push_back(r_start * std::pow(r_max / r_start, static_cast<double>(i) / n));
  grid.push_back(r_max);
  return grid;
}

RadialSample BubbleSolution::at(double r) const {
  r = std::abs(r);
  const Model m{pair.N, pair.p, pair.q};
  const auto& P = profile;
  RadialSample s;
  if (r >= P.r_max()) {
    const double fu = tail.cU * std::pow(r, -tail.eU);
    const double fv = tail.cV * std::pow(r, -tail.eV);
    s.U = tail.b * std::pow(r, -tail.kU) * std::exp(fu);
    s.V = tail.a * std::pow(r, -tail.kV) * std::exp(fv);
    s.dU = s.U * (-tail.kU - tail.eU * fu) / r;
    s.dV = s.V * (-tail.kV - tail.eV * fv) / r;
    return s;
  }
  auto it = std::upper_bound(P.r.begin(), P.r.end(), r);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - P.r.begin() - 1, 0));
  i = std::min(i, P.size() - 2);
  const double r0 = P.r[i];
  const double r1 = P.r[i + 1];
  const double h = r1 - r0;
  const double t = (r - r0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const Model mv{pair.N, pair.q, pair.p};  // swapped roles for the V equation
  const double ddU0 = second_derivative(m, r0, P.dU[i], P.V[i]);
  const double ddU1 = second_derivative(m, r1, P.dU[i + 1], P.V[i + 1]);
  const double ddV0 = second_derivative(mv, r0, P.dV[i], P.U[i]);
  const double ddV1 = second_derivative(mv, r1, P.dV[i + 1], P.U[i + 1]);
  s.U = h00 * P.U[i] + h10 * h * P.dU[i] + h01 * P.U[i + 1] + h11 * h * P.dU[i + 1];
  s.V = h00 * P.V[i] + h10 * h * P.dV[i] + h01 * P.V[i + 1] + h11 * h * P.dV[i + 1];
  s.dU = h00 * P.dU[i] + h10 * h * ddU0 + h01 * P.dU[i + 1] + h11 * h * ddU1;
  s.dV = h00 * P.dV[i] + h10 * h * ddV0 + h01 * P.dV[i + 1] + h11 * h * ddV1;
  return s;
}

TailCoefficients extract_tail(const RadialProfile& profile, const ExponentPair& pair) {
  const DecayExponent decay = decay_exponent(pair);
  if (!decay.gamma) throw DomainError("extract_tail: logarithmic regime q = N/(N-2) is not supported");
  const double N = pair.N;
  const double p = pair.p;
  const double q = pair.q;
  TailCoefficients t;
  t.regime = decay.regime;
  t.gamma = *decay.gamma;
  t.kU = t.gamma + 1.0;
  t.kV = N - 2.0;
  t.eV = p * t.kU - N;
  t.eU = decay.regime == DecayRegime::q_above ? q * (N - 2.0) - N : std::min(N - q * (N - 2.0), t.eV);
  t.fit_hi = profile.r_max();
  t.fit_lo = t.fit_hi / 10.0;
  const TailWindow w = tail_window(profile, t.fit_lo);
  if (w.r.size() < 8) throw DomainError("extract_tail: too few grid nodes in the fit window");
  for (std::size_t i = 0; i < w.r.size(); ++i) {
    if (!(w.U[i] > 0.0) || !(w.V[i] > 0.0) || !(w.dU[i] < 0.0) || !(w.dV[i] < 0.0)) {
      std::ostringstream msg;
      msg << "extract_tail: profile not positive and decreasing at r = " << w.r[i]
          << " (shooting value off the ground state?)";
      throw AccuracyError(msg.str());
    }
  }
  const ComponentFit fu = fit_component(w.r, w.U, t.kU, t.eU, t.fit_lo);
  const ComponentFit fv = fit_component(w.r, w.V, t.kV, t.eV, t.fit_lo);
  t.b = fu.amplitude;
  t.cU = fu.correction;
  t.a = fv.amplitude;
  t.cV = fv.correction;
  t.fit_variation = std::max(fu.variation, fv.variation);
  t.fitted_kU = fu.free_exponent;
  t.fitted_kV = fv.free_exponent;
  return t;
}

double ode_residual(const BubbleSolution& sol, double r_hi) {
  const auto& P = sol.profile;
  const int n = static_cast<int>(P.size());
  const int N = sol.pair.N;
  constexpr int kStencil = 9;
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    if (r_hi > 0.0 && P.r[i] > r_hi) break;
    int first = std::clamp(i - kStencil / 2, 1, n - kStencil);
    std::span<const double> nodes(P.r.data() + first, kStencil);
    const std::vector<double> w = fd_weights(P.r[i], nodes, 1);
    double ddU = 0.0;
    double ddV = 0.0;
    for (int k = 0; k < kStencil; ++k) {
      ddU += w[k] * P.dU[first + k];
      ddV += w[k] * P.dV[first + k];
    }
    const double r = P.r[i];
    const double fu = std::pow(std::max(P.V[i], 0.0), sol.pair.q);
    const double fv = std::pow(std::max(P.U[i], 0.0), sol.pair.p);
    const double lu = (N - 1) / r * P.dU[i];
    const double lv = (N - 1) / r * P.dV[i];
    worst = std::max(worst, std::abs(ddU + lu + fu) / (std::abs(ddU) + std::abs(lu) + fu));
    worst = std::max(worst, std::abs(ddV + lv + fv) / (std::abs(ddV) + std::abs(lv) + fv));
  }
  return worst;
}

BubbleSolution solve_ground_state(const ExponentPair& pair, double tol, double r_max) {
  if (!pair.is_critical() || !pair.admissible) throw DomainError("solve_ground_state: pair must be critical and admissible");
  const DecayExponent decay = decay_exponent(pair);
  if (!decay.gamma) throw DomainError("solve_ground_state: logarithmic regime q = N/(N-2) is not supported");
  if (!(tol >= 1e-14 && tol <= 1e-6)) throw DomainError("solve_ground_state: tol must lie in [1e-14, 1e-6]");
  if (!(r_max >= 10.0)) throw DomainError("solve_ground_state: r_max must be >= 10");

  const Model m{pair.N, pair.p, pair.q};
  BubbleSolution sol;
  sol.pair = pair;
  sol.meta.tol = tol;
  sol.meta.rtol = std::clamp(tol, 1e-13, 1e-10);
  sol.meta.r_max = r_max;
  auto& trace = sol.meta.trace;

  auto run = [&](double beta) {
    const Trial t = shoot(m, beta, sol.meta.rtol, r_max);
    sol.meta.steps += t.steps;
    trace.push_back(t.record);
    return t.record.crossing;
  };

  // Bracket: small beta lets V die first, large beta drives U to zero.
  double lo = 1e-3;
  double hi = 1e3;
  int widen = 0;
  while (run(lo) != Crossing::V_first) {
    if (++widen > 6) throw SolverError("solve_ground_state: no V_first trajectory down to beta = " + std::to_string(lo));
    hi = lo;
    lo /= 10.0;
  }
  widen = 0;
  while (run(hi) != Crossing::U_first) {
    if (++widen > 6) throw SolverError("solve_ground_state: no U_first trajectory up to beta = " + std::to_string(hi));
    lo = hi;
    hi *= 10.0;
  }
  sol.meta.bracket_lo = lo;
  sol.meta.bracket_hi = hi;

  for (int it = 0; it < 400; ++it) {
    const double mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    (run(mid) == Crossing::V_first ? lo : hi) = mid;
  }

  {
    std::vector<ShootingRecord> sorted = trace;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ShootingRecord& x, const ShootingRecord& y) { return x.beta < y.beta; });
    int flips = 0;
    for (std::size_t i = 1; i < sorted.size(); ++i) flips += sorted[i].crossing != sorted[i - 1].crossing;
    sol.meta.dichotomy_ok = flips == 1 && sorted.front().crossing == Crossing::V_first;
  }

  // Store the profile on the grid, trying both ends of the final bracket.
  std::string last_failure;
  for (double beta : {lo + 0.5 * (hi - lo), lo, hi}) {
    const double r0 = start_radius(beta, m.q);
    const std::vector<double> grid = profile_grid(r0, r_max);
    RadialProfile prof;
    prof.r = grid;
    prof.U.assign(grid.size(), 0.0);
    prof.V.assign(grid.size(), 0.0);
    prof.dU.assign(grid.size(), 0.0);
    prof.dV.assign(grid.size(), 0.0);
    prof.U[0] = 1.0;
    prof.V[0] = beta;
    State y = series_start(m, beta, r0);
    double r = r0;
    double h = 0.1 * r0;
    DormandPrince45<State> dp({.rtol = sol.meta.rtol, .atol = 1e-300});
    bool crossed = false;
    auto stop = [&](double, const State& s) { return s[0] <= 0.0 || s[2] <= 0.0; };
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (i > 1) {
        const StepOutcome out = dp.advance(m, r, y, grid[i], h, stop);
        if (out == StepOutcome::failed) throw SolverError("solve_ground_state: integrator failed while storing the profile");
        if (out == StepOutcome::stopped) {
          crossed = true;
          last_failure = "component crossed zero at r = " + std::to_string(r);
          break;
        }
      }
      prof.U[i] = y[0];
      prof.dU[i] = y[1];
      prof.V[i] = y[2];
      prof.dV[i] = y[3];
    }
    sol.meta.steps += dp.accepted() + dp.rejected();
    if (crossed) continue;
    bool monotone = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      monotone = monotone && prof.U[i] > 0.0 && prof.V[i] > 0.0 && prof.dU[i] < 0.0 && prof.dV[i] < 0.0;
    }
    if (!monotone) {
      last_failure = "profile not positive and decreasing";
      continue;
    }
    sol.beta_star = beta;
    sol.meta.r_start = r0;
    sol.profile = std::move(prof);
    break;
  }
  if (sol.profile.size() == 0) {
    throw AccuracyError("solve_ground_state: converged beta but " + last_failure + "; try a smaller r_max");
  }

  sol.tail = extract_tail(sol.profile, pair);
  if (sol.tail.fit_variation > 0.01) {
    std::ostringstream msg;
    msg << "solve_ground_state: tail fit variation " << sol.tail.fit_variation << " exceeds 0.01; try a larger r_max";
    throw AccuracyError(msg.str());
  }
  sol.ode_residual = ode_residual(sol);
  if (sol.ode_residual > 1e-8) {
    std::ostringstream msg;
    msg << "solve_ground_state: ODE residual " << sol.ode_residual << " exceeds 1e-8";
    throw AccuracyError(msg.str());
  }
  return sol;
}

BubbleSolution closed_form_symmetric(int N, double r_max) {
  if (N < 3) throw DomainError("closed_form_symmetric: requires N >= 3");
  const double e = (N + 2.0) / (N - 2.0);
  BubbleSolution sol;
  sol.pair = classify(N, e, e);
  sol.beta_star = 1.0;
  const double c = N * (N - 2.0);
  const double k = N - 2.0;
  const double r0 = 1e-2;
  sol.profile.r = profile_grid(r0, r_max);
  for (double r : sol.profile.r) {
    const double base = 1.0 + r * r / c;
    const double u = std::pow(base, -0.5 * k);
    const double du = -k * r / c * std::pow(base, -0.5 * k - 1.0);
    sol.profile.U.push_back(u);
    sol.profile.V.push_back(u);
    sol.profile.dU.push_back(du);
    sol.profile.dV.push_back(du);
  }
  sol.tail = extract_tail(sol.profile, sol.pair);
  // Exact tail: U = c^{k/2} r^{-k} (1 + c/r^2)^{-k/2}.
  sol.tail.a = sol.tail.b = std::pow(c, 0.5 * k);
  sol.tail.eU = sol.tail.eV = 2.0;
  sol.tail.cU = sol.tail.cV = -0.5 * k * c;
  sol.meta.tol = 0.0;
  sol.meta.r_max = r_max;
  sol.meta.r_start = r0;
  sol.meta.dichotomy_ok = true;
  sol.ode_residual = ode_residual(sol);
  return sol;
}

LogDerivativeLimits log_derivative_check(const BubbleSolution& sol) {
  const auto& t = sol.tail;
  const TailWindow w = tail_window(sol.profile, t.fit_lo > 0.0 ? t.fit_lo : sol.profile.r_max() / 10.0);
  std::vector<double> gu(w.r.size());
  std::vector<double> gv(w.r.size());
  for (std::size_t i = 0; i < w.r.size(); ++i) {
    gu[i] = w.r[i] * w.dU[i] / w.U[i];
    gv[i] = w.r[i] * w.dV[i] / w.V[i];
  }
  const double lo = w.r.front();
  LogDerivativeLimits out;
  out.limU = fit_limit(w.r, gu, t.eU, lo);
  out.limV = fit_limit(w.r, gv, t.eV, lo);
  out.expectedU = -t.kU;
  out.expectedV = -t.kV;
  out.consistent = std::abs(out.limU - out.expectedU) <= 0.05 && std::abs(out.limV - out.expectedV) <= 0.05;
  return out;
}

ScaledBubble::ScaledBubble(const BubbleSolution& sol, double d, Eigen::VectorXd center)
    : base(&sol), delta(d), xi(std::move(center)) {
  if (!(delta > 0.0)) throw DomainError("ScaledBubble: delta must be positive");
  if (xi.size() != sol.pair.N) throw DomainError("ScaledBubble: xi must have N components");
}

std::pair<double, double> evaluate_scaled(const ScaledBubble& sb, const Eigen::VectorXd& x) {
  const auto& sol = *sb.base;
  if (x.size() != sol.pair.N) throw DomainError("evaluate_scaled: point must have N components");
  const ScalingExponents se = scaling_exponents(sol.pair);
  const RadialSample s = sol.at((x - sb.xi).norm() / sb.delta);
  return {std::pow(sb.delta, -se.a) * s.U, std::pow(sb.delta, -se.b) * s.V};
}

std::pair<double, double> derivative_bubbles(const ScaledBubble& sb, int i, const Eigen::MatrixXd& frame,
                                             const Eigen::VectorXd& x) {
  const auto& sol = *sb.base;
  const int N = sol.pair.N;
  if (x.size() != N) throw DomainError("derivative_bubbles: point must have N components");
  if (i < 0 || i > N - 1) throw DomainError("derivative_bubbles: index must lie in {0, ..., N-1}");
  const ScalingExponents se = scaling_exponents(sol.pair);
  const Eigen::VectorXd z = (x - sb.xi) / sb.delta;
  const double s = z.norm();
  const RadialSample rs = sol.at(s);
  const double d = sb.delta;
  if (i == 0) {
    return {std::pow(d, -se.a - 1.0) * (-se.a * rs.U - s * rs.dU),
            std::pow(d, -se.b - 1.0) * (-se.b * rs.V - s * rs.dV)};
  }
  if (frame.rows() != N || frame.cols() != N - 1) throw DomainError("derivative_bubbles: frame must be N x (N-1)");
  const Eigen::MatrixXd gram = frame.transpose() * frame;
  if ((gram - Eigen::MatrixXd::Identity(N - 1, N - 1)).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("derivative_bubbles: frame is not orthonormal to 1e-10");
  }
  if (s == 0.0) return {0.0, 0.0};
  const double dir = z.dot(frame.col(i - 1)) / s;
  return {-std::pow(d, -se.a - 1.0) * rs.dU * dir, -std::pow(d, -se.b - 1.0) * rs.dV * dir};
}

}  // namespace hambubble
