#include <cmath>

#include "doctest.h"
#include "hambubble/errors.hpp"
#include "hambubble/hyperbola.hpp"

using namespace hambubble;

TEST_CASE("q_from_p inverts the hyperbola") {
  CHECK(q_from_p(4, 3) == doctest::Approx(3).epsilon(1e-14));
  CHECK(q_from_p(4, 5) == doctest::Approx(2).epsilon(1e-14));
  CHECK(q_from_p(5, 2.75) == doctest::Approx(2).epsilon(1e-14));
  for (int N = 3; N <= 10; ++N) {
    for (double p : {N / (N - 2.0) + 0.1, 2.5, 4.0, 9.0}) {
      if (!(1.0 / (p + 1) < (N - 2.0) / N)) continue;
      const double q = q_from_p(N, p);
      CHECK(1.0 / (p + 1) + 1.0 / (q + 1) == doctest::Approx((N - 2.0) / N).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(q_from_p(4, 0.5), DomainError);
  CHECK_THROWS_AS(q_from_p(2, 3), DomainError);
}

TEST_CASE("classify") {
  CHECK(classify(4, 3, 3).criticality == Criticality::critical);
  CHECK(classify(4, 3 - 0.01, 3).criticality == Criticality::subcritical);
  CHECK(classify(4, 3 + 0.01, 3).criticality == Criticality::supercritical);
  CHECK(classify(6, 2, 2).is_critical());
  const ExponentPair swapped = classify(5, 2, 2.75);
  CHECK(swapped.swapped);
  CHECK(swapped.p == 2.75);
  CHECK(swapped.q == 2);
  const ExponentPair low = classify(8, q_from_p(8, 0.9), 0.9);
  CHECK_FALSE(low.admissible);
  CHECK_THROWS_AS(critical_pair(8, q_from_p(8, 0.9), 0.9), DomainError);
  CHECK_THROWS_AS(critical_pair(4, 2.9, 3), DomainError);
}

TEST_CASE("decay exponent and gamma identity") {
  const DecayExponent d1 = decay_exponent(critical_pair(4, 3, 3));
  CHECK(d1.regime == DecayRegime::q_above);
  CHECK(*d1.gamma == doctest::Approx(1).epsilon(1e-14));
  const DecayExponent d2 = decay_exponent(critical_pair(5, 4, 1.5));
  CHECK(d2.regime == DecayRegime::q_below);
  CHECK(*d2.gamma == doctest::Approx(1.5).epsilon(1e-12));
  const DecayExponent d3 = decay_exponent(critical_pair(5, 2.75, 2));
  CHECK(d3.regime == DecayRegime::q_above);
  CHECK(*d3.gamma == doctest::Approx(2).epsilon(1e-12));
  const DecayExponent dl = decay_exponent(critical_pair(4, 5, 2));
  CHECK(dl.regime == DecayRegime::q_log);
  CHECK_FALSE(dl.gamma.has_value());
  CHECK_THROWS_AS(gamma_of(critical_pair(4, 5, 2)), DomainError);

  for (int N = 4; N <= 10; ++N) {
    for (int k = 1; k <= 20; ++k) {
      const double sym = (N + 2.0) / (N - 2.0);
      const double q = 1.0 + (sym - 1.0) * k / 20.0;
      if (std::abs(q - N / (N - 2.0)) < 1e-9) continue;
      const ExponentPair pair = critical_pair(N, q_from_p(N, q), q);
      const DecayExponent d = decay_exponent(pair);
      const double branch = d.regime == DecayRegime::q_above ? N / (pair.q + 1) : N * pair.q / (pair.p + 1);
      CHECK(d.gamma2_lhs == doctest::Approx(branch).epsilon(1e-12));
      CHECK(*d.gamma + 1 - N / (pair.p + 1) > 0);
      CHECK(N * (pair.p * pair.q - 1) == doctest::Approx(2 * (pair.p + 1) * (pair.q + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaling exponents") {
  const ScalingExponents s4 = scaling_exponents(critical_pair(4, 3, 3));
  CHECK(s4.a == doctest::Approx(1));
  CHECK(s4.b == doctest::Approx(1));
  const ScalingExponents s5 = scaling_exponents(critical_pair(5, 2.75, 2));
  CHECK(s5.a == doctest::Approx(4.0 / 3).epsilon(1e-14));
  CHECK(s5.b == doctest::Approx(5.0 / 3).epsilon(1e-14));
  CHECK(s5.a + 2 == doctest::Approx(2 * s5.b).epsilon(1e-12));
  CHECK(s5.b + 2 == doctest::Approx(2.75 * s5.a).epsilon(1e-12));
  const ScalingExponents s6 = scaling_exponents(critical_pair(6, 2, 2));
  CHECK(s6.a == doctest::Approx(2));
  CHECK_THROWS_AS(scaling_exponents(classify(4, 2.9, 3)), DomainError);
}

TEST_CASE("threshold_q") {
  CHECK(threshold_q(5) == 1.0);
  CHECK(threshold_q(4) == doctest::Approx(1.4253905296791061).epsilon(1e-14));
}

TEST_CASE("remainder ledger for (5, 11/4, 2)") {
  const RemainderLedger l = remainder_ledger(critical_pair(5, 2.75, 2));
  CHECK(l.E_uv == doctest::Approx(55.0 / 12).epsilon(1e-14));
  CHECK(l.E_pq == doctest::Approx(22.0 / 3).epsilon(1e-14));
  CHECK(l.E_qp == doctest::Approx(8.0 / 3).epsilon(1e-14));
  CHECK(l.e_phi == doctest::Approx(l.E_uv).epsilon(1e-12));
  CHECK(l.capped_min == 1.0);
  CHECK(l.sigma == 0.5);
  CHECK(l.hypotheses_ok);
}

TEST_CASE("e_phi equals E_pq in the q_below regime") {
  const RemainderLedger l = remainder_ledger(critical_pair(5, 4, 1.5));
  CHECK(l.e_phi == doctest::Approx(l.E_pq).epsilon(1e-12));
}

TEST_CASE("sigma is positive above threshold_q") {
  for (int N = 4; N <= 10; ++N) {
    const double lo = std::max(threshold_q(N), 1.0);
    const double sym = (N + 2.0) / (N - 2.0);
    for (int k = 1; k <= 100; ++k) {
      const double q = lo + (sym - lo) * k / 100.0;
      if (std::abs(q - N / (N - 2.0)) < 1e-9) continue;
      const ExponentPair pair = critical_pair(N, q_from_p(N, q), q);
      CHECK(remainder_ledger(pair).sigma > 0);
    }
  }
}

struct HypothesisCase {
  int N;
  double q;
  bool expected;
};

// Blow-up hypotheses: N >= 4, p >= q > 1, q >= 4/(N-2).
constexpr HypothesisCase kHypothesisTable[] = {
    {3, 3.0, false}, {3, 4.0, false},  {4, 1.5, false}, {4, 1.8, false},  {4, 1.99, false},
    {4, 2.0, true},  {4, 3.0, true},   {5, 1.2, false}, {5, 1.3, false},  {5, 4.0 / 3, true},
    {5, 1.5, true},  {5, 2.0, true},   {5, 7.0 / 3, true}, {6, 1.05, true}, {6, 1.4, true},
    {6, 2.0, true},  {8, 1.1, true},   {8, 0.9, false}, {10, 1.01, true}, {10, 1.5, true},
};

TEST_CASE("hypotheses truth table") {
  static_assert(std::size(kHypothesisTable) == 20);
  for (const auto& c : kHypothesisTable) {
    CAPTURE(c.N);
    CAPTURE(c.q);
    const ExponentPair pair = classify(c.N, q_from_p(c.N, c.q), c.q);
    std::string why;
    CHECK(theorem_hypotheses(pair, &why) == c.expected);
    if (!c.expected) CHECK_FALSE(why.empty());
    if (pair.admissible && std::abs(c.q - c.N / (c.N - 2.0)) > 1e-9) {
      CHECK(remainder_ledger(pair).hypotheses_ok == c.expected);
    }
  }
}

TEST_CASE("regime table") {
  const RegimeVariant mm = regime_sign(-1, -1, 2.75, 2);
  CHECK(mm.c2_sign == 1);
  CHECK(mm.admissible_H_sign == -1);
  const RegimeVariant pp = regime_sign(1, 1, 2.75, 2);
  CHECK(pp.c2_sign == -1);
  CHECK(pp.admissible_H_sign == 1);
  const RegimeVariant pm = regime_sign(1, -1, 2.75, 2);
  CHECK(pm.c2_sign == -1);
  CHECK(pm.admissible_H_sign == 1);
  const RegimeVariant mp = regime_sign(-1, 1, 2.75, 2);
  CHECK(mp.c2_sign == 1);
  CHECK(mp.admissible_H_sign == -1);
  for (int sq : {-1, 1}) {
    for (int sp : {-1, 1}) {
      const RegimeVariant a = regime_sign(sq, sp, 2.75, 2);
      const RegimeVariant b = regime_sign(-sq, -sp, 2.75, 2);
      CHECK(a.c2_factor == -b.c2_factor);
      CHECK(a.c2_sign == -b.c2_sign);
      CHECK_FALSE(a.degenerate);
    }
  }
  CHECK(regime_sign(1, -1, 3, 3).degenerate);
  CHECK(regime_sign(-1, 1, 3, 3).degenerate);
  CHECK_FALSE(regime_sign(-1, -1, 3, 3).degenerate);
  CHECK_FALSE(regime_sign(1, 1, 3, 3).degenerate);
  CHECK_THROWS_AS(regime_sign(0, 1, 3, 3), DomainError);
}
