#pragma once

// Harmonic boundary correctors on the half-space {x_N > 0}:
//   Delta phi = 0,  d phi / d x_N = D(|x'|) sum_j rho_j x_j^2 / |x'|  on x_N = 0,
// with D = U' (phi0) or D = V' (psi0), built as single-layer potentials.

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "hambubble/bubble.hpp"

namespace hambubble {

struct QuadricBoundaryData {
  /// rho_1..rho_{N-1}: the boundary is locally x_N = sum_j rho_j x_j^2.
  Eigen::VectorXd rho;
  /// Optional N x (N-1) principal tangent frame and inward normal the data refers to.
  Eigen::MatrixXd frame;
  Eigen::VectorXd normal;

  double H_local() const { return 2.0 * rho.sum() / static_cast<double>(rho.size()); }
};

enum class CorrectorKind { phi0, psi0 };
const char* to_string(CorrectorKind k);

struct CorrectorResolution {
  /// Gauss-Legendre points per panel, in both the radial and the angular rule.
  int order = 12;
  /// Each graded panel is split into this many equal pieces.
  int refine = 1;
};

class CorrectorField {
 public:
  CorrectorField(const BubbleSolution& sol, QuadricBoundaryData rho, CorrectorKind kind,
                 CorrectorResolution res = {});

  /// Field value at x in the closed half-space (x_N >= 0).
  double operator()(const Eigen::VectorXd& x) const;
  /// Neumann data at a boundary point given by its first N-1 coordinates.
  double normal_data(const Eigen::VectorXd& y) const;

  int dimension() const { return N_; }
  CorrectorKind kind() const { return kind_; }
  const QuadricBoundaryData& rho() const { return rho_; }
  const BubbleSolution& bubble() const { return *sol_; }
  const CorrectorResolution& resolution() const { return res_; }
  /// c_N = 2 / ((N-2) sigma_{N-1}).
  double kernel_constant() const { return c_N_; }
  /// Decay exponent of the field: gamma for phi0, N-3 for psi0.
  double decay_exponent() const;
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t cache_size() const;

 private:
  struct Cache;
  std::pair<double, double> radial_pair(double radius, double height) const;
  std::pair<double, double> compute_pair(double radius, double height) const;
  double profile_derivative(double s) const;

  const BubbleSolution* sol_;
  QuadricBoundaryData rho_;
  CorrectorKind kind_;
  CorrectorResolution res_;
  int N_;
  double c_N_;
  double sigma_Nm3_;
  double wallis_c_;
  double wallis_s_;
  std::vector<std::string> warnings_;
  std::shared_ptr<Cache> cache_;
};

CorrectorField build_corrector(const BubbleSolution& sol, const QuadricBoundaryData& rho, CorrectorKind kind,
                               CorrectorResolution res = {});

/// Max over probes of |d_N field - g| / max |g|, the normal derivative taken by
/// one-sided differences at heights h, 2h, 3h, 4h. Probes are boundary points
/// (N-1 coordinates) with |y| >= 0.1.
double neumann_residual(const CorrectorField& field, const std::vector<Eigen::VectorXd>& probes, double h = 1e-2);

struct DecayFit {
  /// Exponent from ln|f| = c0 + slope ln r + (c1 + c2 ln r) r^{-e} + c3 r^{-2e}.
  double slope = 0.0;
  /// Plain least-squares slope of ln|f| against ln r.
  double raw_slope = 0.0;
  double expected = 0.0;
  double correction_exponent = 0.0;
  double r_lo = 5.0;
  double r_hi = 50.0;
  bool inconclusive = false;
};

/// Fit along the ray through `direction` (default e_N) over |x| in [r_lo, r_hi].
DecayFit decay_fit(const CorrectorField& field, double r_lo = 5.0, double r_hi = 50.0, int samples = 20,
                   const Eigen::VectorXd& direction = Eigen::VectorXd());

/// |sum_i D_ii f| / sum_i |D_ii f| with central second differences of step h.
double harmonicity(const CorrectorField& field, const Eigen::VectorXd& x, double h = 1e-2);

struct C3Crosscheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_difference = 0.0;
};

/// lhs: boundary integral of (d_nu phi0) V. rhs: C3 * H_local.
C3Crosscheck c3_crosscheck(const BubbleSolution& sol, const QuadricBoundaryData& rho);
/// Boundary integral only.
double c3_boundary_integral(const BubbleSolution& sol, const QuadricBoundaryData& rho);

struct ExpansionOrder {
  double leading_u = 0.0;    // -N/(p+1) + 1
  double leading_v = 0.0;    // -N/(q+1) + 1
  double remainder_u = 0.0;  // -N/(p+1) + 1 + min(gamma, 1)
  double remainder_v = 0.0;  // -N/(q+1) + 2
  double pointwise_u = 0.0;  // -N/(p+1) + min(gamma, 1)
  double pointwise_v = 0.0;  // -N/(q+1) + 1
  double derivative_remainder_u = 0.0;  // -N/(p+1) + min(gamma, 1)
  double derivative_remainder_v = 0.0;  // -N/(q+1) + 1
  int sigma = 0;      // 1 iff gamma in {1, 2}
  int tau = 0;        // 1 iff N in {4, 5}
  int sigma_hat = 0;  // 1 iff gamma = 1
  int tau_hat = 0;    // 1 iff N = 4
};

ExpansionOrder expansion_order(const ExponentPair& pair);

struct TwoTermValue {
  double u_bubble = 0.0;
  double v_bubble = 0.0;
  double u_approx = 0.0;
  double v_approx = 0.0;
  ExpansionOrder order;
};

/// U_{delta,0}(x) + delta^{-N/(p+1)+1} phi0(x/delta) and the V analogue.
/// Requires gamma >= 1 and delta in (0, 1/2].
TwoTermValue two_term_expansion(const CorrectorField& phi0, const CorrectorField& psi0, double delta,
                                const Eigen::VectorXd& x);

}  // namespace hambubble
