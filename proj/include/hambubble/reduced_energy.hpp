#pragma once

// Reduced energy Theta(d, xi) = -c4 H(xi) d - c2 ln d, its stationary scale d0 and the
// blow-up prediction assembled from boundary geometry and bubble constants.

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hambubble/constants.hpp"
#include "hambubble/geometry.hpp"
#include "hambubble/halfspace.hpp"

namespace hambubble {

double theta(const ReducedConstants& c, double H, double d);

struct StationaryScale {
  double d0 = 0.0;
  double theta_at_d0 = 0.0;
  /// c2 / d0^2.
  double theta_dd = 0.0;
};

/// d0 = -c2 / (c4 H). Requires H < 0 and c2, c4 > 0.
StationaryScale d_star(const ReducedConstants& c, double H);

/// c1 - c2 eps ln eps + c3 eps + Theta(d, H) eps, without the o(eps) remainder.
double reduced_energy_eval(const ReducedConstants& c, double eps, double d, double H);

struct HypothesesSnapshot {
  bool ok = false;
  std::string violated;
  double threshold_q = 0.0;
  double sigma = 0.0;
};

struct BlowupPrediction {
  CriticalPoint xi0;
  double H0 = 0.0;
  double d0 = 0.0;
  double theta_at_d0 = 0.0;
  double theta_dd = 0.0;
  /// (eps, delta = d0 eps).
  std::vector<std::pair<double, double>> delta_samples;
  RegimeVariant regime;
  /// Carried through unchanged; the leading-order expansion does not depend on it.
  double mu = 1.0;
  HypothesesSnapshot hypotheses;
  ReducedConstants constants;
  /// Admissible critical points (nondegenerate, H < 0) ordered by H; xi0 is one of them.
  std::vector<CriticalPoint> candidates;
  std::vector<std::string> notes;
};

struct PredictOptions {
  double mu = 1.0;
  /// Index into the admissible candidates; default picks the most negative H.
  std::optional<std::size_t> select;
  std::vector<Eigen::VectorXd> seeds;
};

/// RefusalError when the exponent hypotheses fail or no nondegenerate critical point with
/// H < 0 exists.
BlowupPrediction predict_blowup(const BoundarySurface& surface, const ReducedConstants& c, const ExponentPair& pair,
                                const std::vector<double>& eps_list, const PredictOptions& opt = {});
BlowupPrediction predict_blowup(const CriticalSearch& search, const ReducedConstants& c, const ExponentPair& pair,
                                const std::vector<double>& eps_list, const PredictOptions& opt = {});

struct AnsatzSample {
  Eigen::VectorXd x;
  /// Half-space coordinates (tangential, flattened normal) at xi0.
  Eigen::VectorXd chart;
  double u = 0.0;
  double v = 0.0;
  double u_bubble = 0.0;
  double v_bubble = 0.0;
};

struct AnsatzField {
  double delta = 0.0;
  double chart_radius = 0.0;
  std::vector<AnsatzSample> samples;
  std::vector<std::string> notes;
  ExpansionOrder order;
};

/// Two-term expansion of the projected bubble at xi0 with delta = d0 eps. Points outside the
/// chart (farther than chart_radius from xi0, or below the boundary graph) are skipped.
AnsatzField ansatz_field(const BlowupPrediction& pred, const BubbleSolution& sol, const QuadricBoundaryData& rho,
                         double eps, const std::vector<Eigen::VectorXd>& points);

struct ThetaLandscape {
  std::vector<double> d;
  /// Tangential chart coordinates of each node and the surface point they map to.
  std::vector<Eigen::VectorXd> chart;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> H;
  /// theta(i, k) at chart node i and d[k].
  Eigen::MatrixXd theta;
  /// Chart node of smallest H among H < 0, with its d0 and Theta(d0).
  std::optional<std::size_t> minimum_node;
  double minimum_d0 = 0.0;
  double minimum_theta = 0.0;
};

/// Log-spaced d in [d_lo, d_hi] (n values) times the chart grid centered at the projection of
/// center: n_chart nodes per tangent axis over [-half_width, half_width].
ThetaLandscape landscape(const BoundarySurface& surface, const ReducedConstants& c, const Eigen::VectorXd& center,
                         double half_width, int n_chart, double d_lo, double d_hi, int n_d);

/// Columns: d, y1..y_{N-1}, H, theta.
void write_landscape_csv(const ThetaLandscape& L, std::ostream& out);

}  // namespace hambubble
