#include "hambubble/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "hambubble/constants.hpp"
#include "hambubble/errors.hpp"
#include "hambubble/quadrature.hpp"

namespace hambubble {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSnap = 1e9;  // cache grid: 1e-9 in radius and height

// int_0^pi sin^m
double wallis(int m) { return std::sqrt(kPi) * std::tgamma(0.5 * (m + 1)) / std::tgamma(0.5 * m + 1.0); }

std::vector<double> clean(std::vector<double> b) {
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double x : b) {
    if (out.empty() || x - out.back() > 1e-13 * std::max(1.0, std::abs(x))) out.push_back(x);
  }
  return out;
}

// Graded radial breakpoints: geometric away from the origin, refined toward the
// foot point s = radius and toward the kernel scale `height`.
std::vector<double> radial_breaks(double radius, double height, double s_far) {
  const double L = std::max({1.0, radius, height});
  std::vector<double> b{0.0};
  for (double s = 0.25; s < 100.0 * L; s *= std::numbers::sqrt2) b.push_back(s);
  for (double s = 100.0 * L; s < s_far; s *= 4.0) b.push_back(s);
  b.push_back(s_far);
  if (height > 0.0 && height < 0.25) {
    for (double s = std::max(0.25 * height, 1e-6); s < 0.25; s *= 2.0) b.push_back(s);
  }
  if (radius > 0.0) {
    const double floor = std::max(height, 1e-12 * radius);
    b.push_back(radius);
    for (int j = 1; j <= 45; ++j) {
      const double d = std::ldexp(radius, -j);
      if (d < 0.25 * floor) break;
      b.push_back(radius - d);
      b.push_back(radius + d);
    }
  }
  return clean(std::move(b));
}

template <class F>
void for_each_node(const std::vector<double>& breaks, const CorrectorResolution& res, F&& f) {
  const GaussRule& g = gauss_legendre(res.order);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double span = (breaks[i + 1] - breaks[i]) / res.refine;
    for (int k = 0; k < res.refine; ++k) {
      const double a = breaks[i] + k * span;
      const double half = 0.5 * span;
      const double mid = a + half;
      for (std::size_t j = 0; j < g.x.size(); ++j) f(mid + half * g.x[j], half * g.w[j]);
    }
  }
}

struct KeyHash {
  std::size_t operator()(const std::pair<long long, long long>& k) const {
    return std::hash<long long>()(k.first) ^ (std::hash<long long>()(k.second) * 0x9e3779b97f4a7c15ULL);
  }
};

}  // namespace

struct CorrectorField::Cache {
  std::mutex mu;
  std::unordered_map<std::pair<long long, long long>, std::pair<double, double>, KeyHash> values;
};

const char* to_string(CorrectorKind k) { return k == CorrectorKind::phi0 ? "phi0" : "psi0"; }

CorrectorField::CorrectorField(const BubbleSolution& sol, QuadricBoundaryData rho, CorrectorKind kind,
                               CorrectorResolution res)
    : sol_(&sol), rho_(std::move(rho)), kind_(kind), res_(res), N_(sol.pair.N), cache_(std::make_shared<Cache>()) {
  if (N_ < 3) throw DomainError("corrector: requires N >= 3");
  if (rho_.rho.size() != N_ - 1) throw DomainError("corrector: rho must have N-1 entries");
  if (!rho_.rho.allFinite()) throw DomainError("corrector: rho must be finite");
  if (res_.order < 2 || res_.refine < 1) throw DomainError("corrector: resolution must have order >= 2, refine >= 1");
  c_N_ = 2.0 / ((N_ - 2.0) * sphere_measure(N_ - 1));
  sigma_Nm3_ = N_ == 3 ? 2.0 : sphere_measure(N_ - 3);
  wallis_c_ = wallis(N_ - 3) - wallis(N_ - 1);
  wallis_s_ = wallis(N_ - 1);
  const double gamma = gamma_of(sol.pair);
  if (gamma < 1.0 - 1e-12) {
    warnings_.push_back("gamma < 1: the two-term expansion is not valid for this pair");
  }
}

CorrectorField build_corrector(const BubbleSolution& sol, const QuadricBoundaryData& rho, CorrectorKind kind,
                               CorrectorResolution res) {
  return CorrectorField(sol, rho, kind, res);
}

double CorrectorField::decay_exponent() const {
  return kind_ == CorrectorKind::phi0 ? gamma_of(sol_->pair) : N_ - 3.0;
}

std::size_t CorrectorField::cache_size() const {
  std::lock_guard lock(cache_->mu);
  return cache_->values.size();
}

double CorrectorField::profile_derivative(double s) const {
  const RadialSample r = sol_->at(s);
  return kind_ == CorrectorKind::phi0 ? r.dU : r.dV;
}

double CorrectorField::normal_data(const Eigen::VectorXd& y) const {
  if (y.size() != N_ - 1 && y.size() != N_) throw DomainError("normal_data: boundary point needs N-1 coordinates");
  const Eigen::VectorXd yp = y.head(N_ - 1);
  const double s = yp.norm();
  if (s == 0.0) return 0.0;
  const double quad = (rho_.rho.array() * yp.array().square()).sum();
  return profile_derivative(s) * quad / s;
}

std::pair<double, double> CorrectorField::radial_pair(double radius, double height) const {
  const std::pair<long long, long long> key{std::llround(radius * kSnap), std::llround(height * kSnap)};
  {
    std::lock_guard lock(cache_->mu);
    auto it = cache_->values.find(key);
    if (it != cache_->values.end()) return it->second;
  }
  // Computed outside the lock; a concurrent duplicate produces the same value.
  const auto value = compute_pair(key.first / kSnap, key.second / kSnap);
  std::lock_guard lock(cache_->mu);
  cache_->values.emplace(key, value);
  return value;
}

std::pair<double, double> CorrectorField::compute_pair(double radius, double t) const {
  const int N = N_;
  const double expo = 0.5 * (2.0 - N);
  const double s_far = 1e12 * std::max({1.0, radius, t});
  const bool on_axis = radius <= 1e-12 * std::max(1.0, t);
  const std::vector<double> sb = radial_breaks(on_axis ? 0.0 : radius, t, s_far);
  double Jc = 0.0;
  double Js = 0.0;
  for_each_node(sb, res_, [&](double s, double ws) {
    const double D = profile_derivative(s);
    if (D == 0.0) return;
    double Ic = 0.0;
    double Is = 0.0;
    if (on_axis) {
      const double k = std::pow(s * s + t * t, expo);
      Ic = wallis_c_ * k;
      Is = wallis_s_ * k;
    } else {
      const double m2 = (s - radius) * (s - radius) + t * t;
      const double sr = s * radius;
      std::vector<double> tb{0.0};
      for (double th = std::max(std::sqrt(m2 / sr), 1e-14); th < kPi; th *= 2.0) tb.push_back(th);
      tb.push_back(kPi);
      tb = clean(std::move(tb));
      for_each_node(tb, res_, [&](double th, double wt) {
        const double sh = std::sin(0.5 * th);
        const double k = std::pow(m2 + 4.0 * sr * sh * sh, expo);
        const double sn = std::sin(th);
        const double cs = std::cos(th);
        const double base = std::pow(sn, N - 3) * k * wt;
        Ic += base * cs * cs;
        Is += base * sn * sn;
      });
    }
    const double w = ws * std::pow(s, N - 1) * D;
    Jc += w * Ic;
    Js += w * Is;
  });
  // Remainder beyond s_far from the leading tail D ~ -k C s^{-k-1} and kernel ~ s^{2-N}.
  const auto& tail = sol_->tail;
  const double k = kind_ == CorrectorKind::phi0 ? tail.kU : tail.kV;
  const double C = kind_ == CorrectorKind::phi0 ? tail.b : tail.a;
  const double rem = -k * C * std::pow(s_far, 1.0 - k) / (k - 1.0);
  Jc += wallis_c_ * rem;
  Js += wallis_s_ * rem;
  return {Jc, Js};
}

double CorrectorField::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != N_) throw DomainError("corrector: point must have N components");
  const double t = x[N_ - 1];
  if (t < 0.0) throw DomainError("corrector: point must satisfy x_N >= 0");
  const Eigen::VectorXd xp = x.head(N_ - 1);
  const double radius = xp.norm();
  const double T = rho_.rho.sum();
  double A = 0.0;
  if (radius > 0.0) A = (rho_.rho.array() * (xp / radius).array().square()).sum();
  const auto [Jc, Js] = radial_pair(radius, t);
  return -c_N_ * sigma_Nm3_ * (A * Jc + (T - A) / (N_ - 2.0) * Js);
}

double neumann_residual(const CorrectorField& field, const std::vector<Eigen::VectorXd>& probes, double h) {
  const int N = field.dimension();
  if (!(h > 0.0)) throw DomainError("neumann_residual: step must be positive");
  const std::vector<double> heights{h, 2 * h, 3 * h, 4 * h};
  const std::vector<double> w = fd_weights(0.0, heights, 1);
  double worst = 0.0;
  double scale = 0.0;
  for (const auto& probe : probes) {
    if (probe.size() != N - 1 && !(probe.size() == N && probe[N - 1] == 0.0)) {
      throw DomainError("neumann_residual: probes must be boundary points");
    }
    if (probe.head(N - 1).norm() < 0.1) throw DomainError("neumann_residual: probes must satisfy |y| >= 0.1");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    x.head(N - 1) = probe.head(N - 1);
    double d = 0.0;
    for (int k = 0; k < 4; ++k) {
      x[N - 1] = heights[k];
      d += w[k] * field(x);
    }
    const double g = field.normal_data(probe);
    worst = std::max(worst, std::abs(d - g));
    scale = std::max(scale, std::abs(g));
  }
  return scale > 0.0 ? worst / scale : worst;
}

DecayFit decay_fit(const CorrectorField& field, double r_lo, double r_hi, int samples,
                   const Eigen::VectorXd& direction) {
  const int N = field.dimension();
  Eigen::VectorXd dir = direction.size() == 0 ? Eigen::VectorXd::Unit(N, N - 1) : direction;
  if (dir.size() != N || !(dir[N - 1] > 0.0)) throw DomainError("decay_fit: direction must point into x_N > 0");
  dir.normalize();
  if (!(r_lo > 0.0 && r_hi > r_lo) || samples < 6) throw DomainError("decay_fit: need 0 < r_lo < r_hi and >= 6 samples");
  DecayFit out;
  out.r_lo = r_lo;
  out.r_hi = r_hi;
  out.expected = -field.decay_exponent();
  out.correction_exponent = std::max(N - 2.0 - field.decay_exponent(), 1.0);
  Eigen::MatrixXd X(samples, 5);
  Eigen::VectorXd y(samples);
  double sign = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (samples - 1));
    const double v = field(Eigen::VectorXd(r * dir));
    if (sign == 0.0) sign = v > 0.0 ? 1.0 : -1.0;
    if (!(std::abs(v) > 1e-250) || v * sign <= 0.0) out.inconclusive = true;
    const double e = out.correction_exponent;
    X(i, 0) = 1.0;
    X(i, 1) = std::log(r);
    X(i, 2) = std::pow(r / r_lo, -e);
    X(i, 3) = X(i, 2) * std::log(r / r_lo);
    X(i, 4) = std::pow(r / r_lo, -2.0 * e);
    y[i] = std::log(std::abs(v));
  }
  if (out.inconclusive) return out;
  out.slope = X.colPivHouseholderQr().solve(y)[1];
  out.raw_slope = X.leftCols(2).colPivHouseholderQr().solve(y)[1];
  return out;
}

double harmonicity(const CorrectorField& field, const Eigen::VectorXd& x, double h) {
  const int N = field.dimension();
  if (x.size() != N || x[N - 1] - h < 0.0) throw DomainError("harmonicity: probe must sit at least h inside");
  const double f0 = field(x);
  double sum = 0.0;
  double mag = 0.0;
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double d2 = (field(xp) - 2.0 * f0 + field(xm)) / (h * h);
    sum += d2;
    mag += std::abs(d2);
  }
  return mag > 0.0 ? std::abs(sum) / mag : 0.0;
}

double c3_boundary_integral(const BubbleSolution& sol, const QuadricBoundaryData& rho) {
  const int N = sol.pair.N;
  if (rho.rho.size() != N - 1) throw DomainError("c3_crosscheck: rho must have N-1 entries");
  // Angular moments int_{S^{N-2}} omega_j^2 by Gauss-Legendre in the polar angle.
  const GaussRule& g = gauss_legendre(48);
  double moment = 0.0;
  for (std::size_t j = 0; j < g.x.size(); ++j) {
    const double th = 0.5 * kPi * (g.x[j] + 1.0);
    moment += 0.5 * kPi * g.w[j] * std::pow(std::sin(th), N - 3) * std::cos(th) * std::cos(th);
  }
  moment *= N == 3 ? 2.0 : sphere_measure(N - 3);
  double angular = 0.0;
  for (int j = 0; j < N - 1; ++j) angular += rho.rho[j] * moment;

  const double s_far = 1e12;
  std::vector<double> breaks{0.0};
  for (double s = 0.25; s < 100.0; s *= std::numbers::sqrt2) breaks.push_back(s);
  for (double s = 100.0; s < s_far; s *= 4.0) breaks.push_back(s);
  breaks.push_back(s_far);
  double radial = 0.0;
  for_each_node(clean(breaks), CorrectorResolution{20, 1}, [&](double s, double w) {
    const RadialSample r = sol.at(s);
    radial += w * std::pow(s, N - 1) * r.dU * r.V;
  });
  const auto& t = sol.tail;
  radial += -t.kU * t.a * t.b * std::pow(s_far, 1.0 - t.kU) / (t.kU - 1.0);
  return -angular * radial;
}

C3Crosscheck c3_crosscheck(const BubbleSolution& sol, const QuadricBoundaryData& rho) {
  C3Crosscheck out;
  out.lhs = c3_boundary_integral(sol, rho);
  out.rhs = boundary_constants(sol).C3 * rho.H_local();
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.relative_difference = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

ExpansionOrder expansion_order(const ExponentPair& pair) {
  const double gamma = gamma_of(pair);
  const ScalingExponents se = scaling_exponents(pair);
  const double m = std::min(gamma, 1.0);
  auto is = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
  ExpansionOrder o;
  o.leading_u = -se.a + 1.0;
  o.leading_v = -se.b + 1.0;
  o.remainder_u = -se.a + 1.0 + m;
  o.remainder_v = -se.b + 2.0;
  o.pointwise_u = -se.a + m;
  o.pointwise_v = -se.b + 1.0;
  o.derivative_remainder_u = -se.a + m;
  o.derivative_remainder_v = -se.b + 1.0;
  o.sigma = is(gamma, 1.0) || is(gamma, 2.0);
  o.tau = pair.N == 4 || pair.N == 5;
  o.sigma_hat = is(gamma, 1.0);
  o.tau_hat = pair.N == 4;
  return o;
}

TwoTermValue two_term_expansion(const CorrectorField& phi0, const CorrectorField& psi0, double delta,
                                const Eigen::VectorXd& x) {
  if (phi0.kind() != CorrectorKind::phi0 || psi0.kind() != CorrectorKind::psi0) {
    throw DomainError("two_term_expansion: expects a phi0 and a psi0 field");
  }
  if (&phi0.bubble() != &psi0.bubble()) throw DomainError("two_term_expansion: fields must share the bubble");
  const BubbleSolution& sol = phi0.bubble();
  const double gamma = gamma_of(sol.pair);
  if (gamma < 1.0 - 1e-12) {
    throw RefusalError("two_term_expansion: requires gamma >= 1; otherwise the corrector is not leading over the remainder");
  }
  if (!(delta > 0.0 && delta <= 0.5)) throw DomainError("two_term_expansion: delta must lie in (0, 1/2]");
  const int N = sol.pair.N;
  if (x.size() != N || x[N - 1] < 0.0) throw DomainError("two_term_expansion: point must lie in x_N >= 0");
  const ScalingExponents se = scaling_exponents(sol.pair);
  const RadialSample r = sol.at(x.norm() / delta);
  const Eigen::VectorXd z = x / delta;
  TwoTermValue out;
  out.u_bubble = std::pow(delta, -se.a) * r.U;
  out.v_bubble = std::pow(delta, -se.b) * r.V;
  out.u_approx = out.u_bubble + std::pow(delta, 1.0 - se.a) * phi0(z);
  out.v_approx = out.v_bubble + std::pow(delta, 1.0 - se.b) * psi0(z);
  out.order = expansion_order(sol.pair);
  return out;
}

}  // namespace hambubble
