#pragma once

// Implicit boundary surfaces of bounded domains Omega = {F < 0}, their mean
// curvature, quadric coefficients and the critical points of H.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "hambubble/halfspace.hpp"
#include "json.hpp"

namespace hambubble {

enum class SurfaceFamily { sphere, shell, ellipsoid, ellipsoidal_hole, custom };
const char* to_string(SurfaceFamily f);
SurfaceFamily surface_family_from_string(const std::string& s);

using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using GradientField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using HessianField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// One connected piece of the boundary. Omega lies on the side F < 0.
struct SurfaceComponent {
  ScalarField F;
  GradientField grad;  // finite differences when empty
  HessianField hess;   // finite differences when empty
  /// Star center used for seeding; empty when the piece is not star-shaped about a known point.
  Eigen::VectorXd center;
  /// Smallest radius of curvature, or a user estimate; sets chart and FD step sizes.
  double length_scale = 1.0;
  /// Bounding radius about the center.
  double extent = 1.0;
};

class BoundarySurface {
 public:
  static BoundarySurface sphere(int N, double radius, const Eigen::VectorXd& center = {});
  /// Omega = {r_in < |x - c| < r_out}.
  static BoundarySurface shell(int N, double r_in, double r_out, const Eigen::VectorXd& center = {});
  static BoundarySurface ellipsoid(const Eigen::VectorXd& semi_axes, const Eigen::VectorXd& center = {});
  /// Omega = ball of radius r_out minus the closed ellipsoid.
  static BoundarySurface ellipsoidal_hole(double r_out, const Eigen::VectorXd& semi_axes,
                                          const Eigen::VectorXd& center = {});
  /// F = x^T A x + b.x + c; A symmetric.
  static BoundarySurface quadric(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double c,
                                 double length_scale = 1.0);
  static BoundarySurface custom(int N, std::vector<SurfaceComponent> pieces, nlohmann::json params = {});

  /// The same zero set with Omega on the other side (F -> -F).
  BoundarySurface complement() const;
  /// x -> rotation * x + translation applied to the surface.
  BoundarySurface moved(const Eigen::MatrixXd& rotation, const Eigen::VectorXd& translation) const;

  int dimension() const { return N_; }
  SurfaceFamily family() const { return family_; }
  const nlohmann::json& params() const { return params_; }
  std::size_t components() const { return pieces_.size(); }
  const SurfaceComponent& component(std::size_t i) const { return pieces_.at(i); }

  double value(std::size_t i, const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(std::size_t i, const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(std::size_t i, const Eigen::VectorXd& x) const;
  /// Component with the smallest first-order distance |F| / |grad F| at x.
  std::size_t nearest_component(const Eigen::VectorXd& x) const;

  /// Largest relative mismatch between the analytic derivatives and central differences at x.
  double derivative_consistency(const Eigen::VectorXd& x) const;

 private:
  BoundarySurface() = default;
  int N_ = 0;
  SurfaceFamily family_ = SurfaceFamily::custom;
  nlohmann::json params_;
  std::vector<SurfaceComponent> pieces_;
};

/// {family, params, dimension}, with optional params.rotation, params.translation, params.complement.
BoundarySurface surface_from_json(const nlohmann::json& spec);

struct SurfacePoint {
  Eigen::VectorXd x;
  /// Outward unit normal of Omega, grad F / |grad F|.
  Eigen::VectorXd nu;
  /// N x (N-1), orthonormal columns spanning the tangent space.
  Eigen::MatrixXd frame;
  std::size_t component = 0;
};

/// Newton projection of x onto the nearest component; GeometryError when it fails.
SurfacePoint project_to_surface(const BoundarySurface& s, const Eigen::VectorXd& x);

struct CurvatureReport {
  double H = 0.0;
  /// Ascending; positive where Omega is locally convex.
  Eigen::VectorXd kappa;
  Eigen::VectorXd rho;
  /// Principal frame (columns match kappa).
  Eigen::MatrixXd frame;
  /// Derivatives of H in the principal chart.
  Eigen::VectorXd tangent_grad_H;
  Eigen::MatrixXd tangent_hess_H;
  bool nondegenerate = false;
};

CurvatureReport mean_curvature(const BoundarySurface& s, const Eigen::VectorXd& x);
/// Curvature only, without the chart derivatives of H.
CurvatureReport principal_curvatures(const BoundarySurface& s, const Eigen::VectorXd& x);

/// rho_j = kappa_j / 2 with the principal frame and inward normal attached.
QuadricBoundaryData quadric_coefficients(const BoundarySurface& s, const Eigen::VectorXd& x);

/// Point of the chart at x0: x0 + frame y moved along the normal back onto the surface.
Eigen::VectorXd chart_point(const BoundarySurface& s, const SurfacePoint& base, const Eigen::VectorXd& y);

struct CriticalPoint {
  SurfacePoint point;
  CurvatureReport report;
  /// Nondegenerate local minimum of H.
  bool minimum = false;
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  int seeds = 0;
  /// Newton runs started (two per seed) and how many converged.
  int runs = 0;
  int converged = 0;
  std::vector<std::string> diagnostics;
};

/// Quasi-uniform points on each component (Halton directions from its center).
std::vector<Eigen::VectorXd> default_seeds(const BoundarySurface& s, int per_component = 64);

/// Damped Newton on the tangential gradient of H from each seed, once plain and once with
/// |eigenvalues| so that it descends to minima. Points are deduplicated at distance 1e-6
/// and sorted by H, then by coordinates.
CriticalSearch find_critical_points(const BoundarySurface& s, const std::vector<Eigen::VectorXd>& seeds = {});

}  // namespace hambubble
