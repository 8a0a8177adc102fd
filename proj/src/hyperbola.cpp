#include "hambubble/hyperbola.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "hambubble/errors.hpp"

namespace hambubble {

namespace {

bool near(double x, double y, double tol = kCriticalityTol) { return std::abs(x - y) <= tol; }

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "unknown";
}

const char* to_string(DecayRegime r) {
  switch (r) {
    case DecayRegime::q_above: return "q_above";
    case DecayRegime::q_below: return "q_below";
    case DecayRegime::q_log: return "q_log";
  }
  return "unknown";
}

double q_from_p(int N, double p) {
  if (N < 3) throw DomainError("q_from_p: requires N >= 3");
  if (!(p > -1.0)) throw DomainError("q_from_p: requires p > -1");
  const double slack = static_cast<double>(N - 2) / N - 1.0 / (p + 1.0);
  if (!(slack > 0.0)) throw DomainError("q_from_p: requires 1/(p+1) < (N-2)/N");
  return 1.0 / slack - 1.0;
}

ExponentPair classify(int N, double p, double q) {
  if (N < 3) throw DomainError("classify: requires N >= 3");
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("classify: requires p > 0 and q > 0");
  ExponentPair out;
  out.N = N;
  if (p < q) {
    std::swap(p, q);
    out.swapped = true;
  }
  out.p = p;
  out.q = q;
  out.hyperbola_residual = 1.0 / (p + 1.0) + 1.0 / (q + 1.0) - static_cast<double>(N - 2) / N;
  if (std::abs(out.hyperbola_residual) <= kCriticalityTol) {
    out.criticality = Criticality::critical;
  } else {
    out.criticality = out.hyperbola_residual > 0.0 ? Criticality::subcritical : Criticality::supercritical;
  }
  if (!(q > 1.0)) {
    out.admissible = false;
    out.rejection = "q <= 1 (the reduction needs p, q > 1)";
  }
  return out;
}

ExponentPair critical_pair(int N, double p, double q) {
  ExponentPair pair = classify(N, p, q);
  if (!pair.admissible) throw DomainError("exponent pair rejected: " + pair.rejection);
  if (!pair.is_critical()) {
    std::ostringstream msg;
    msg << "exponent pair is " << to_string(pair.criticality)
        << ", not on the critical hyperbola (residual " << pair.hyperbola_residual << ")";
    throw DomainError(msg.str());
  }
  return pair;
}

DecayExponent decay_exponent(const ExponentPair& pair) {
  if (!pair.is_critical()) throw DomainError("decay_exponent: pair is not critical");
  const int N = pair.N;
  const double p = pair.p;
  const double q = pair.q;
  const double q_ref = static_cast<double>(N) / (N - 2);
  DecayExponent out;
  if (near(q, q_ref)) {
    out.regime = DecayRegime::q_log;
    return out;
  }
  if (q > q_ref) {
    out.regime = DecayRegime::q_above;
    out.gamma = N - 3.0;
    out.gamma2_branch = N / (q + 1.0);
  } else {
    out.regime = DecayRegime::q_below;
    out.gamma = q * (N - 2.0) - 3.0;
    out.gamma2_branch = N * q / (p + 1.0);
  }
  out.gamma2_lhs = *out.gamma + 1.0 - N / (p + 1.0);
  if (!near(out.gamma2_lhs, out.gamma2_branch, 1e-10 * std::max(1.0, std::abs(out.gamma2_branch)))) {
    throw AccuracyError("decay_exponent: gamma identity violated beyond tolerance");
  }
  return out;
}

double gamma_of(const ExponentPair& pair) {
  const DecayExponent d = decay_exponent(pair);
  if (!d.gamma) throw DomainError("logarithmic decay case q = N/(N-2) is not supported");
  return *d.gamma;
}

ScalingExponents scaling_exponents(const ExponentPair& pair) {
  if (!pair.is_critical()) throw DomainError("scaling_exponents: pair is not critical");
  return {pair.N / (pair.p + 1.0), pair.N / (pair.q + 1.0)};
}

double threshold_q(int N) {
  if (N < 3) throw DomainError("threshold_q: requires N >= 3");
  return (5.0 + std::sqrt(8.0 * N + 9.0)) / (4.0 * (N - 2.0));
}

bool theorem_hypotheses(const ExponentPair& pair, std::string* violated) {
  auto fail = [&](const char* why) {
    if (violated) *violated = why;
    return false;
  };
  if (pair.N < 4) return fail("N >= 4");
  if (!(pair.p >= pair.q)) return fail("p >= q");
  if (!(pair.q > 1.0)) return fail("q > 1");
  if (!(pair.q >= 4.0 / (pair.N - 2.0) - kCriticalityTol)) return fail("q >= 4/(N-2)");
  if (violated) violated->clear();
  return true;
}

RemainderLedger remainder_ledger(const ExponentPair& pair) {
  const DecayExponent decay = decay_exponent(pair);
  if (!decay.gamma) throw DomainError("remainder_ledger: logarithmic case q = N/(N-2) is unsupported");
  const double N = pair.N;
  const double p = pair.p;
  const double q = pair.q;
  RemainderLedger L;
  L.E_uv = p * N / (q + 1.0);
  L.E_pq = p * q * N / (p + 1.0);
  L.E_qp = q * N / (p + 1.0);
  L.e_phi = (*decay.gamma + 1.0 - N / (p + 1.0)) * p;
  L.e_V = N * q / (p + 1.0);
  L.capped_min = std::min({L.E_uv, L.E_pq, L.E_qp, L.e_phi, L.e_V, 1.0});
  L.sigma = L.capped_min - 0.5;
  L.s1_log = near(L.e_phi, 1.0);
  L.s2_log = near(L.e_V, 1.0);
  L.threshold_q = threshold_q(pair.N);
  L.hypotheses_ok = theorem_hypotheses(pair, &L.violated_hypothesis);
  if (q > L.threshold_q && !(L.sigma > 0.0)) {
    throw AccuracyError("remainder_ledger: sigma <= 0 although q exceeds the threshold");
  }
  return L;
}

RegimeVariant regime_sign(int sign_q, int sign_p, double p, double q) {
  if ((sign_q != 1 && sign_q != -1) || (sign_p != 1 && sign_p != -1)) {
    throw DomainError("regime_sign: signs must be +1 or -1");
  }
  if (!(p > 1.0) || !(q > 1.0)) throw DomainError("regime_sign: requires p, q > 1");
  RegimeVariant v;
  v.sign_q = sign_q;
  v.sign_p = sign_p;
  const double wq = 1.0 / ((q + 1.0) * (q + 1.0));
  const double wp = 1.0 / ((p + 1.0) * (p + 1.0));
  v.c2_factor = -sign_q * wq - sign_p * wp;
  if (sign_q != sign_p && near(p, q)) {
    v.degenerate = true;
    v.c2_factor = 0.0;
    return v;
  }
  v.c2_sign = sign_of(v.c2_factor);
  v.admissible_H_sign = -v.c2_sign;
  return v;
}

}  // namespace hambubble
