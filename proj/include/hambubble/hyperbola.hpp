#pragma once

// Arithmetic on the critical hyperbola 1/(p+1) + 1/(q+1) = (N-2)/N: classification
// of exponent pairs, the bubble decay exponent gamma, scaling exponents and the
// exponent bookkeeping behind the remainder estimate of the reduction.

#include <optional>
#include <string>

namespace hambubble {

inline constexpr double kCriticalityTol = 1e-12;

enum class Criticality { subcritical, critical, supercritical };
enum class DecayRegime { q_above, q_below, q_log };

const char* to_string(Criticality c);
const char* to_string(DecayRegime r);

struct ExponentPair {
  int N = 0;
  double p = 0.0;
  double q = 0.0;
  Criticality criticality = Criticality::subcritical;
  /// 1/(p+1) + 1/(q+1) - (N-2)/N; positive means subcritical.
  double hyperbola_residual = 0.0;
  /// Input had p < q and the exponents were exchanged.
  bool swapped = false;
  /// p > 1 and q > 1. Pairs failing this are classified but unusable downstream.
  bool admissible = true;
  std::string rejection;

  bool is_critical() const { return criticality == Criticality::critical; }
};

/// Solves the hyperbola for q. Requires N >= 3 and 1/(p+1) < (N-2)/N.
double q_from_p(int N, double p);

/// Classifies (N, p, q), canonicalizing to p >= q. Never throws for p, q > 0.
ExponentPair classify(int N, double p, double q);

/// classify() plus the requirement that the pair is admissible and critical.
ExponentPair critical_pair(int N, double p, double q);

struct DecayExponent {
  DecayRegime regime = DecayRegime::q_above;
  /// Absent in the logarithmic case q = N/(N-2).
  std::optional<double> gamma;
  /// gamma + 1 - N/(p+1) and the branch value it must equal (N/(q+1) or Nq/(p+1)).
  double gamma2_lhs = 0.0;
  double gamma2_branch = 0.0;
};

DecayExponent decay_exponent(const ExponentPair& pair);

/// gamma or DomainError for the logarithmic regime.
double gamma_of(const ExponentPair& pair);

/// U scales with a = N/(p+1), V with b = N/(q+1): U_delta = delta^{-a} U(./delta).
struct ScalingExponents {
  double a = 0.0;
  double b = 0.0;
};

ScalingExponents scaling_exponents(const ExponentPair& pair);

/// (5 + sqrt(8N+9)) / (4(N-2)): above this q every remainder exponent exceeds 1/2.
double threshold_q(int N);

struct RemainderLedger {
  double E_uv = 0.0;   // pN/(q+1)
  double E_pq = 0.0;   // pqN/(p+1)
  double E_qp = 0.0;   // qN/(p+1)
  double e_phi = 0.0;  // (gamma + 1 - N/(p+1)) p
  double e_V = 0.0;    // Nq/(p+1)
  double capped_min = 0.0;
  double sigma = 0.0;  // capped_min - 1/2
  bool s1_log = false;  // e_phi sits exactly at 1
  bool s2_log = false;  // e_V sits exactly at 1
  double threshold_q = 0.0;
  bool hypotheses_ok = false;
  std::string violated_hypothesis;
};

RemainderLedger remainder_ledger(const ExponentPair& pair);

/// N >= 4, p >= q > 1 and q >= 4/(N-2). On failure names the first violated condition.
bool theorem_hypotheses(const ExponentPair& pair, std::string* violated = nullptr);

/// Sign bookkeeping for the perturbed exponents (q + sign_q eps, p + sign_p eps).
struct RegimeVariant {
  int sign_q = -1;
  int sign_p = -1;
  /// -sign_q/(q+1)^2 - sign_p/(p+1)^2, the eps ln(delta) coefficient up to a positive factor.
  double c2_factor = 0.0;
  int c2_sign = 0;
  int admissible_H_sign = 0;
  /// Mixed signs with p == q: the coefficient vanishes and the table gives no answer.
  bool degenerate = false;
};

RegimeVariant regime_sign(int sign_q, int sign_p, double p, double q);

}  // namespace hambubble
