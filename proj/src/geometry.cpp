#include "hambubble/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hambubble/errors.hpp"

namespace hambubble {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSingularGradient = 1e-8;
constexpr double kDedupe = 1e-6;

VectorXd default_center(int N, const VectorXd& c) {
  if (c.size() == 0) return VectorXd::Zero(N);
  if (c.size() != N) throw DomainError("surface: center has the wrong dimension");
  return c;
}

// sign * (sum ((x - c)_i / a_i)^2 - 1)
SurfaceComponent axis_quadric(const VectorXd& axes, const VectorXd& center, double sign) {
  const VectorXd inv2 = axes.array().square().inverse();
  SurfaceComponent c;
  c.F = [=](const VectorXd& x) { return sign * (((x - center).array().square() * inv2.array()).sum() - 1.0); };
  c.grad = [=](const VectorXd& x) -> VectorXd { return sign * 2.0 * ((x - center).array() * inv2.array()).matrix(); };
  c.hess = [=](const VectorXd&) -> MatrixXd { return (sign * 2.0 * inv2).asDiagonal(); };
  c.center = center;
  c.length_scale = axes.minCoeff() * axes.minCoeff() / axes.maxCoeff();
  c.extent = axes.maxCoeff();
  return c;
}

void check_axes(const VectorXd& axes) {
  if (axes.size() < 2) throw DomainError("surface: dimension must be at least 2");
  if (!(axes.array() > 0.0).all() || !axes.allFinite()) throw DomainError("surface: semi-axes must be positive");
}

nlohmann::json to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MatrixXd matrix_from(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(m.cols())) throw DomainError("surface: ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

MatrixXd tangent_frame(const VectorXd& nu) {
  const MatrixXd column = nu;
  Eigen::HouseholderQR<MatrixXd> qr(column);
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(nu.size(), nu.size());
  return Q.rightCols(nu.size() - 1);
}

double radical_inverse(int base, long index) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// (tr Hess - nu^T Hess nu) / (|grad| (N-1)) on component i.
double mean_curvature_value(const BoundarySurface& s, std::size_t i, const VectorXd& x) {
  const VectorXd g = s.gradient(i, x);
  const double gn = g.norm();
  if (gn < kSingularGradient) throw GeometryError("mean curvature: singular point, |grad F| < 1e-8");
  const VectorXd nu = g / gn;
  const MatrixXd Hs = s.hessian(i, x);
  return (Hs.trace() - nu.dot(Hs * nu)) / (gn * (s.dimension() - 1));
}

double on_surface_distance(const BoundarySurface& s, std::size_t i, const VectorXd& x) {
  const double gn = s.gradient(i, x).norm();
  if (gn < kSingularGradient) throw GeometryError("surface: singular point, |grad F| < 1e-8");
  return std::abs(s.value(i, x)) / gn;
}

SurfacePoint make_point(const BoundarySurface& s, std::size_t i, const VectorXd& x) {
  SurfacePoint p;
  p.x = x;
  const VectorXd g = s.gradient(i, x);
  const double gn = g.norm();
  if (gn < kSingularGradient) throw GeometryError("surface: singular point, |grad F| < 1e-8");
  p.nu = g / gn;
  p.frame = tangent_frame(p.nu);
  p.component = i;
  return p;
}

SurfacePoint project_on(const BoundarySurface& s, std::size_t i, VectorXd x) {
  for (int it = 0; it < 100; ++it) {
    const double f = s.value(i, x);
    const VectorXd g = s.gradient(i, x);
    const double g2 = g.squaredNorm();
    if (g2 < kSingularGradient * kSingularGradient) throw GeometryError("projection: singular point");
    const VectorXd step = f / g2 * g;
    double n = step.norm();
    const double cap = 0.5 * s.component(i).extent;
    x -= n > cap ? VectorXd(step * (cap / n)) : step;
    if (n <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  if (!(std::abs(s.value(i, x)) <= 1e-10)) throw GeometryError("projection onto the surface did not converge");
  return make_point(s, i, x);
}

// Central differences of H in the chart at base: gradient (step hg) and Hessian (step hh).
void chart_derivatives(const BoundarySurface& s, const SurfacePoint& base, VectorXd& grad, MatrixXd& hess) {
  const int m = s.dimension() - 1;
  const double L = s.component(base.component).length_scale;
  const double hg = 1e-5 * L;
  const double hh = 1e-3 * L;
  auto h_at = [&](const VectorXd& y) { return mean_curvature_value(s, base.component, chart_point(s, base, y)); };
  grad.resize(m);
  hess.resize(m, m);
  const double h0 = h_at(VectorXd::Zero(m));
  for (int i = 0; i < m; ++i) {
    const VectorXd e = VectorXd::Unit(m, i);
    grad[i] = (h_at(hg * e) - h_at(-hg * e)) / (2.0 * hg);
    hess(i, i) = (h_at(hh * e) - 2.0 * h0 + h_at(-hh * e)) / (hh * hh);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const VectorXd ei = VectorXd::Unit(m, i);
      const VectorXd ej = VectorXd::Unit(m, j);
      const double v = (h_at(hh * (ei + ej)) - h_at(hh * (ei - ej)) - h_at(hh * (ej - ei)) + h_at(-hh * (ei + ej))) /
                       (4.0 * hh * hh);
      hess(i, j) = hess(j, i) = v;
    }
  }
}

double degeneracy_threshold(const Eigen::VectorXd& eig, double kappa_scale) {
  return std::max(1e-6 * eig.cwiseAbs().maxCoeff(), 1e-6 * std::pow(kappa_scale, 3));
}

}  // namespace

const char* to_string(SurfaceFamily f) {
  switch (f) {
    case SurfaceFamily::sphere: return "sphere";
    case SurfaceFamily::shell: return "shell";
    case SurfaceFamily::ellipsoid: return "ellipsoid";
    case SurfaceFamily::ellipsoidal_hole: return "ellipsoidal_hole";
    case SurfaceFamily::custom: return "custom";
  }
  return "custom";
}

SurfaceFamily surface_family_from_string(const std::string& s) {
  for (auto f : {SurfaceFamily::sphere, SurfaceFamily::shell, SurfaceFamily::ellipsoid, SurfaceFamily::ellipsoidal_hole,
                 SurfaceFamily::custom}) {
    if (s == to_string(f)) return f;
  }
  throw DomainError("surface: unknown family '" + s + "'");
}

BoundarySurface BoundarySurface::sphere(int N, double radius, const VectorXd& center) {
  if (!(radius > 0.0)) throw DomainError("sphere: radius must be positive");
  const VectorXd c = default_center(N, center);
  BoundarySurface s;
  s.N_ = N;
  s.family_ = SurfaceFamily::sphere;
  s.params_ = {{"radius", radius}, {"center", to_json(c)}};
  s.pieces_.push_back(axis_quadric(VectorXd::Constant(N, radius), c, 1.0));
  return s;
}

BoundarySurface BoundarySurface::shell(int N, double r_in, double r_out, const VectorXd& center) {
  if (!(r_in > 0.0 && r_out > r_in)) throw DomainError("shell: need 0 < r_in < r_out");
  const VectorXd c = default_center(N, center);
  BoundarySurface s;
  s.N_ = N;
  s.family_ = SurfaceFamily::shell;
  s.params_ = {{"inner_radius", r_in}, {"outer_radius", r_out}, {"center", to_json(c)}};
  s.pieces_.push_back(axis_quadric(VectorXd::Constant(N, r_in), c, -1.0));
  s.pieces_.push_back(axis_quadric(VectorXd::Constant(N, r_out), c, 1.0));
  return s;
}

BoundarySurface BoundarySurface::ellipsoid(const VectorXd& semi_axes, const VectorXd& center) {
  check_axes(semi_axes);
  const int N = static_cast<int>(semi_axes.size());
  const VectorXd c = default_center(N, center);
  BoundarySurface s;
  s.N_ = N;
  s.family_ = SurfaceFamily::ellipsoid;
  s.params_ = {{"semi_axes", to_json(semi_axes)}, {"center", to_json(c)}};
  s.pieces_.push_back(axis_quadric(semi_axes, c, 1.0));
  return s;
}

BoundarySurface BoundarySurface::ellipsoidal_hole(double r_out, const VectorXd& semi_axes, const VectorXd& center) {
  check_axes(semi_axes);
  const int N = static_cast<int>(semi_axes.size());
  const VectorXd c = default_center(N, center);
  if (!(semi_axes.maxCoeff() < r_out)) throw DomainError("ellipsoidal_hole: ellipsoid must fit inside the ball");
  BoundarySurface s;
  s.N_ = N;
  s.family_ = SurfaceFamily::ellipsoidal_hole;
  s.params_ = {{"outer_radius", r_out}, {"semi_axes", to_json(semi_axes)}, {"center", to_json(c)}};
  s.pieces_.push_back(axis_quadric(semi_axes, c, -1.0));
  s.pieces_.push_back(axis_quadric(VectorXd::Constant(N, r_out), c, 1.0));
  return s;
}

BoundarySurface BoundarySurface::quadric(const MatrixXd& A, const VectorXd& b, double c, double length_scale) {
  const int N = static_cast<int>(A.rows());
  if (A.cols() != N || b.size() != N) throw DomainError("quadric: A must be N x N and b of length N");
  if (!(length_scale > 0.0)) throw DomainError("quadric: length_scale must be positive");
  const MatrixXd S = 0.5 * (A + A.transpose());
  SurfaceComponent piece;
  piece.F = [=](const VectorXd& x) { return x.dot(S * x) + b.dot(x) + c; };
  piece.grad = [=](const VectorXd& x) -> VectorXd { return 2.0 * S * x + b; };
  piece.hess = [=](const VectorXd&) -> MatrixXd { return 2.0 * S; };
  piece.length_scale = length_scale;
  piece.extent = length_scale;
  Eigen::LDLT<MatrixXd> ldlt(S);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    piece.center = -0.5 * ldlt.solve(b);
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    const double level = piece.center.dot(S * piece.center) - c;
    if (es.eigenvalues().minCoeff() > 0.0 && level > 0.0) piece.extent = std::sqrt(level / es.eigenvalues().minCoeff());
  }
  std::vector<std::vector<double>> rows(N, std::vector<double>(N));
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) rows[i][k] = S(i, k);
  return custom(N, {piece}, {{"A", rows}, {"b", to_json(b)}, {"c", c}, {"length_scale", length_scale}});
}

BoundarySurface BoundarySurface::custom(int N, std::vector<SurfaceComponent> pieces, nlohmann::json params) {
  if (N < 2) throw DomainError("surface: dimension must be at least 2");
  if (pieces.empty()) throw DomainError("surface: at least one component is required");
  for (const auto& p : pieces) {
    if (!p.F) throw DomainError("surface: component without an implicit function");
    if (p.center.size() != 0 && p.center.size() != N) throw DomainError("surface: center has the wrong dimension");
  }
  BoundarySurface s;
  s.N_ = N;
  s.family_ = SurfaceFamily::custom;
  s.params_ = params.is_null() ? nlohmann::json::object() : std::move(params);
  s.pieces_ = std::move(pieces);
  return s;
}

BoundarySurface BoundarySurface::complement() const {
  BoundarySurface s = *this;
  for (auto& p : s.pieces_) {
    const SurfaceComponent q = p;
    p.F = [q](const VectorXd& x) { return -q.F(x); };
    if (q.grad) p.grad = [q](const VectorXd& x) -> VectorXd { return -q.grad(x); };
    if (q.hess) p.hess = [q](const VectorXd& x) -> MatrixXd { return -q.hess(x); };
  }
  s.params_["complement"] = !params_.value("complement", false);
  return s;
}

BoundarySurface BoundarySurface::moved(const MatrixXd& rotation, const VectorXd& translation) const {
  if (rotation.rows() != N_ || rotation.cols() != N_ || translation.size() != N_) {
    throw DomainError("surface motion: rotation must be N x N and translation of length N");
  }
  if ((rotation.transpose() * rotation - MatrixXd::Identity(N_, N_)).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("surface motion: rotation is not orthogonal");
  }
  BoundarySurface s = *this;
  const MatrixXd R = rotation;
  const VectorXd t = translation;
  for (auto& p : s.pieces_) {
    const SurfaceComponent q = p;
    auto local = [R, t](const VectorXd& x) -> VectorXd { return R.transpose() * (x - t); };
    p.F = [q, local](const VectorXd& x) { return q.F(local(x)); };
    if (q.grad) p.grad = [q, local, R](const VectorXd& x) -> VectorXd { return R * q.grad(local(x)); };
    if (q.hess) p.hess = [q, local, R](const VectorXd& x) -> MatrixXd { return R * q.hess(local(x)) * R.transpose(); };
    if (q.center.size() == N_) p.center = R * q.center + t;
  }
  std::vector<std::vector<double>> rows(N_, std::vector<double>(N_));
  for (int i = 0; i < N_; ++i)
    for (int k = 0; k < N_; ++k) rows[i][k] = R(i, k);
  s.params_["motions"].push_back({{"rotation", rows}, {"translation", to_json(t)}});
  return s;
}

double BoundarySurface::value(std::size_t i, const VectorXd& x) const {
  if (x.size() != N_) throw DomainError("surface: point has the wrong dimension");
  return pieces_.at(i).F(x);
}

VectorXd BoundarySurface::gradient(std::size_t i, const VectorXd& x) const {
  const auto& p = pieces_.at(i);
  if (x.size() != N_) throw DomainError("surface: point has the wrong dimension");
  if (p.grad) return p.grad(x);
  const double h = 1e-6 * std::max(p.length_scale, x.norm());
  VectorXd g(N_);
  for (int k = 0; k < N_; ++k) {
    VectorXd a = x;
    VectorXd b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (p.F(a) - p.F(b)) / (2.0 * h);
  }
  return g;
}

MatrixXd BoundarySurface::hessian(std::size_t i, const VectorXd& x) const {
  const auto& p = pieces_.at(i);
  if (x.size() != N_) throw DomainError("surface: point has the wrong dimension");
  if (p.hess) return p.hess(x);
  const double h = 1e-4 * std::max(p.length_scale, x.norm());
  MatrixXd H(N_, N_);
  for (int k = 0; k < N_; ++k) {
    VectorXd a = x;
    VectorXd b = x;
    a[k] += h;
    b[k] -= h;
    H.col(k) = (gradient(i, a) - gradient(i, b)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

std::size_t BoundarySurface::nearest_component(const VectorXd& x) const {
  std::size_t best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double gn = gradient(i, x).norm();
    const double d = gn > 0.0 ? std::abs(value(i, x)) / gn : std::numeric_limits<double>::infinity();
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

double BoundarySurface::derivative_consistency(const VectorXd& x) const {
  const std::size_t i = nearest_component(x);
  const auto& p = pieces_[i];
  const double h = 1e-5 * std::max(p.length_scale, 1.0);
  VectorXd g(N_);
  MatrixXd H(N_, N_);
  for (int k = 0; k < N_; ++k) {
    VectorXd a = x;
    VectorXd b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (value(i, a) - value(i, b)) / (2.0 * h);
    H.col(k) = (gradient(i, a) - gradient(i, b)) / (2.0 * h);
  }
  const VectorXd ga = gradient(i, x);
  const MatrixXd Ha = hessian(i, x);
  const double eg = (g - ga).norm() / std::max(1.0, ga.norm());
  const double eh = (H - Ha).norm() / std::max(1.0, Ha.norm());
  return std::max(eg, eh);
}

BoundarySurface surface_from_json(const nlohmann::json& spec) {
  try {
    const SurfaceFamily family = surface_family_from_string(spec.at("family").get<std::string>());
    const int N = spec.at("dimension").get<int>();
    const nlohmann::json params = spec.value("params", nlohmann::json::object());
    const VectorXd center = params.contains("center") ? vector_from(params["center"]) : VectorXd();
    auto axes = [&] {
      const VectorXd a = vector_from(params.at("semi_axes"));
      if (a.size() != N) throw DomainError("surface: semi_axes length must equal dimension");
      return a;
    };
    std::optional<BoundarySurface> s;
    switch (family) {
      case SurfaceFamily::sphere: s = BoundarySurface::sphere(N, params.at("radius").get<double>(), center); break;
      case SurfaceFamily::shell:
        s = BoundarySurface::shell(N, params.at("inner_radius").get<double>(), params.at("outer_radius").get<double>(),
                                   center);
        break;
      case SurfaceFamily::ellipsoid: s = BoundarySurface::ellipsoid(axes(), center); break;
      case SurfaceFamily::ellipsoidal_hole:
        s = BoundarySurface::ellipsoidal_hole(params.at("outer_radius").get<double>(), axes(), center);
        break;
      case SurfaceFamily::custom:
        s = BoundarySurface::quadric(matrix_from(params.at("A")), vector_from(params.at("b")),
                                     params.at("c").get<double>(), params.value("length_scale", 1.0));
        break;
    }
    if (s->dimension() != N) throw DomainError("surface: parameters do not match dimension");
    if (params.contains("rotation") || params.contains("translation")) {
      const MatrixXd R = params.contains("rotation") ? matrix_from(params["rotation"]) : MatrixXd::Identity(N, N);
      const VectorXd t = params.contains("translation") ? vector_from(params["translation"]) : VectorXd::Zero(N);
      s = s->moved(R, t);
    }
    if (params.value("complement", false)) s = s->complement();
    return *s;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("surface spec: ") + e.what());
  }
}

SurfacePoint project_to_surface(const BoundarySurface& s, const VectorXd& x) {
  return project_on(s, s.nearest_component(x), x);
}

VectorXd chart_point(const BoundarySurface& s, const SurfacePoint& base, const VectorXd& y) {
  const VectorXd x0 = base.x + base.frame * y;
  double t = 0.0;
  for (int it = 0; it < 60; ++it) {
    const VectorXd x = x0 + t * base.nu;
    const double f = s.value(base.component, x);
    const double d = s.gradient(base.component, x).dot(base.nu);
    if (std::abs(d) < kSingularGradient) throw GeometryError("chart: normal line is tangent to the surface");
    const double dt = f / d;
    t -= dt;
    if (std::abs(dt) <= 1e-16 * std::max(1.0, x.norm())) break;
  }
  return x0 + t * base.nu;
}

CurvatureReport principal_curvatures(const BoundarySurface& s, const VectorXd& x) {
  if (x.size() != s.dimension()) throw DomainError("curvature: point has the wrong dimension");
  const std::size_t i = s.nearest_component(x);
  const double tol = 1e-8 * std::max(1.0, s.component(i).extent);
  if (on_surface_distance(s, i, x) > tol) throw GeometryError("curvature: point is not on the surface");
  const SurfacePoint p = make_point(s, i, x);
  const double gn = s.gradient(i, x).norm();
  const MatrixXd shape = p.frame.transpose() * s.hessian(i, x) * p.frame / gn;
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (shape + shape.transpose()));
  CurvatureReport r;
  r.kappa = es.eigenvalues();
  r.frame = p.frame * es.eigenvectors();
  r.H = r.kappa.sum() / (s.dimension() - 1);
  r.rho = 0.5 * r.kappa;
  return r;
}

CurvatureReport mean_curvature(const BoundarySurface& s, const VectorXd& x) {
  CurvatureReport r = principal_curvatures(s, x);
  SurfacePoint base = make_point(s, s.nearest_component(x), x);
  base.frame = r.frame;
  chart_derivatives(s, base, r.tangent_grad_H, r.tangent_hess_H);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(r.tangent_hess_H);
  const double kscale = std::max(r.kappa.cwiseAbs().maxCoeff(), 1.0 / s.component(base.component).length_scale);
  const VectorXd eig = es.eigenvalues();
  r.nondegenerate = eig.cwiseAbs().minCoeff() > degeneracy_threshold(eig, kscale);
  return r;
}

QuadricBoundaryData quadric_coefficients(const BoundarySurface& s, const VectorXd& x) {
  const CurvatureReport r = principal_curvatures(s, x);
  QuadricBoundaryData q;
  q.rho = r.rho;
  q.frame = r.frame;
  q.normal = -make_point(s, s.nearest_component(x), x).nu;
  if (std::abs(q.H_local() - r.H) > 1e-10 * std::max(1.0, std::abs(r.H))) {
    throw AccuracyError("quadric_coefficients: 2 sum rho / (N-1) differs from H");
  }
  return q;
}

std::vector<VectorXd> default_seeds(const BoundarySurface& s, int per_component) {
  const int N = s.dimension();
  if (N > static_cast<int>(std::size(kPrimes))) throw DomainError("default_seeds: dimension too large for Halton seeding");
  std::vector<VectorXd> seeds;
  for (std::size_t i = 0; i < s.components(); ++i) {
    const auto& c = s.component(i);
    const bool star = c.center.size() == N;
    const VectorXd origin = star ? c.center : VectorXd::Zero(N);
    int made = 0;
    for (long k = 1; made < per_component && k < 100L * per_component; ++k) {
      VectorXd z(N);
      for (int d = 0; d < N; ++d) z[d] = 2.0 * radical_inverse(kPrimes[d], k) - 1.0;
      if (z.norm() < 1e-3) continue;
      if (star) {
        const VectorXd dir = z.normalized();
        double lo = 0.0;
        double hi = 2.0 * c.extent;
        const double flo = c.F(origin);
        if (flo * c.F(origin + hi * dir) > 0.0) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * c.extent; ++it) {
          const double mid = 0.5 * (lo + hi);
          (c.F(origin + mid * dir) * flo > 0.0 ? lo : hi) = mid;
        }
        seeds.push_back(project_on(s, i, origin + 0.5 * (lo + hi) * dir).x);
      } else {
        try {
          seeds.push_back(project_on(s, i, origin + c.extent * z).x);
        } catch (const GeometryError&) {
          continue;
        }
      }
      ++made;
    }
  }
  return seeds;
}

CriticalSearch find_critical_points(const BoundarySurface& s, const std::vector<VectorXd>& seeds_in) {
  CriticalSearch out;
  const std::vector<VectorXd> seeds = seeds_in.empty() ? default_seeds(s) : seeds_in;
  out.seeds = static_cast<int>(seeds.size());
  std::vector<CriticalPoint> found;
  // Each seed runs plain Newton (any critical point) and a descent variant that
  // flips negative curvature directions (minima).
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    for (const bool descend : {true, false}) {
      try {
        SurfacePoint p = project_to_surface(s, seeds[k]);
        const double L = s.component(p.component).length_scale;
        const double gtol = 1e-9 / (L * L);
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
          VectorXd g;
          MatrixXd Hs;
          chart_derivatives(s, p, g, Hs);
          if (g.norm() <= gtol) {
            converged = true;
            break;
          }
          const Eigen::SelfAdjointEigenSolver<MatrixXd> es(Hs);
          const VectorXd eig = es.eigenvalues();
          const double cut = degeneracy_threshold(eig, 1.0 / L);
          VectorXd inv = VectorXd::Zero(eig.size());
          for (Eigen::Index j = 0; j < eig.size(); ++j) {
            if (std::abs(eig[j]) > cut) inv[j] = 1.0 / (descend ? std::abs(eig[j]) : eig[j]);
          }
          VectorXd step = -(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * g);
          if (step.norm() == 0.0) step = -0.1 * L * g.normalized();
          if (step.norm() > 0.2 * L) step *= 0.2 * L / step.norm();
          p = project_on(s, p.component, chart_point(s, p, step));
        }
        ++out.runs;
        if (!converged) {
          out.diagnostics.push_back("seed " + std::to_string(k) + (descend ? " (descent)" : " (newton)") +
                                    ": no convergence in 60 iterations");
          continue;
        }
        ++out.converged;
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const CriticalPoint& q) { return (q.point.x - p.x).norm() < kDedupe; });
        if (dup) continue;
        CriticalPoint cp;
        cp.point = p;
        cp.report = mean_curvature(s, p.x);
        cp.minimum = cp.report.nondegenerate &&
                     Eigen::SelfAdjointEigenSolver<MatrixXd>(cp.report.tangent_hess_H).eigenvalues().minCoeff() > 0.0;
        found.push_back(std::move(cp));
      } catch (const GeometryError& e) {
        out.diagnostics.push_back("seed " + std::to_string(k) + ": " + e.what());
      }
    }
  }
  if (found.empty()) out.diagnostics.push_back("no critical point converged from any seed");
  auto key = [](const CriticalPoint& c) { return std::llround(c.report.H * 1e9); };
  std::sort(found.begin(), found.end(), [&](const CriticalPoint& a, const CriticalPoint& b) {
    if (key(a) != key(b)) return key(a) < key(b);
    return std::lexicographical_compare(a.point.x.data(), a.point.x.data() + a.point.x.size(), b.point.x.data(),
                                        b.point.x.data() + b.point.x.size());
  });
  out.points = std::move(found);
  return out;
}

}  // namespace hambubble
