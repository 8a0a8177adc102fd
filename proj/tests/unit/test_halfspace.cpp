#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hambubble/constants.hpp"
#include "hambubble/errors.hpp"
#include "hambubble/halfspace.hpp"
#include "oracle_values.hpp"

using namespace hambubble;

namespace {

QuadricBoundaryData rho_of(std::initializer_list<double> v) {
  QuadricBoundaryData d;
  d.rho.resize(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) d.rho[i++] = c;
  return d;
}

std::vector<Eigen::VectorXd> axis_probes(int N) {
  std::vector<Eigen::VectorXd> p;
  for (double r : {0.5, 1.0, 2.0, 4.0}) p.push_back(r * Eigen::VectorXd::Unit(N - 1, 0));
  return p;
}

std::vector<Eigen::VectorXd> interior_points(int N) {
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd x(N);
    for (int j = 0; j < N; ++j) x[j] = std::sin(1.3 * k + 0.7 * j) * 2.0;
    x[N - 1] = 0.3 + 0.4 * k;
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("zero data gives a zero field") {
  const BubbleSolution& s = fixtures::symmetric4();
  const CorrectorField f(s, rho_of({0, 0, 0}), CorrectorKind::phi0);
  for (const auto& x : interior_points(4)) CHECK(f(x) == 0.0);
  CHECK(neumann_residual(f, axis_probes(4)) == 0.0);
  const C3Crosscheck c = c3_crosscheck(s, rho_of({0, 0, 0}));
  CHECK(c.lhs == 0.0);
  CHECK(c.rhs == 0.0);
}

TEST_CASE("kernel constant") {
  const CorrectorField f(fixtures::symmetric4(), rho_of({0.5, 0.5, 0.5}), CorrectorKind::phi0);
  CHECK(f.kernel_constant() == doctest::Approx(2.0 / (2.0 * 2 * oracle::pi2)).epsilon(1e-14));
}

TEST_CASE("Neumann condition holds on the boundary") {
  const BubbleSolution& s = fixtures::symmetric4();
  const QuadricBoundaryData rho = rho_of({0.5, 0.5, 0.5});
  const CorrectorField f(s, rho, CorrectorKind::phi0);
  CHECK(neumann_residual(f, axis_probes(4)) <= 1e-3);
  std::vector<Eigen::VectorXd> off_axis;
  for (double r : {0.5, 1.0, 2.0, 4.0}) off_axis.push_back(r * Eigen::Vector3d(0.6, 0.0, 0.8));
  CHECK(neumann_residual(CorrectorField(s, rho_of({1.0, 0.2, 0.3}), CorrectorKind::phi0), off_axis) <= 1e-3);
  CHECK(neumann_residual(CorrectorField(s, rho, CorrectorKind::psi0), axis_probes(4)) <= 1e-3);
  const BubbleSolution& a = fixtures::pair_5_11_4();
  CHECK(neumann_residual(CorrectorField(a, rho_of({0.5, 0.5, 0.5, 0.5}), CorrectorKind::phi0), axis_probes(5)) <= 1e-3);
  CHECK_THROWS_AS(neumann_residual(f, {Eigen::Vector3d(0.05, 0, 0)}), DomainError);
}

TEST_CASE("doubling the quadrature nodes halves the residual") {
  const BubbleSolution& s = fixtures::symmetric4();
  const QuadricBoundaryData rho = rho_of({0.5, 0.5, 0.5});
  const double coarse = neumann_residual(CorrectorField(s, rho, CorrectorKind::phi0, {2, 1}), axis_probes(4));
  const double fine = neumann_residual(CorrectorField(s, rho, CorrectorKind::phi0, {2, 2}), axis_probes(4));
  CAPTURE(coarse);
  CAPTURE(fine);
  CHECK(fine * 2 <= coarse);
}

TEST_CASE("self-convergence of a field value") {
  const BubbleSolution& s = fixtures::symmetric4();
  const QuadricBoundaryData rho = rho_of({0.5, 0.5, 0.5});
  const Eigen::Vector4d x(0, 0, 0, 1);
  const double base = CorrectorField(s, rho, CorrectorKind::phi0)(x);
  const double dense = CorrectorField(s, rho, CorrectorKind::phi0, {24, 2})(x);
  CHECK(base == doctest::Approx(dense).epsilon(1e-8));
  CHECK(base > 0);
}

TEST_CASE("decay slopes") {
  struct Case {
    const BubbleSolution* sol;
    CorrectorKind kind;
    double expected;
  };
  const Case cases[] = {
      {&fixtures::symmetric4(), CorrectorKind::phi0, -1},
      {&fixtures::symmetric4(), CorrectorKind::psi0, -1},
      {&fixtures::pair_5_11_4(), CorrectorKind::phi0, -2},
      {&fixtures::pair_5_11_4(), CorrectorKind::psi0, -2},
  };
  for (const auto& c : cases) {
    const int N = c.sol->pair.N;
    const QuadricBoundaryData rho{Eigen::VectorXd::Constant(N - 1, 0.5), {}, {}};
    const CorrectorField f(*c.sol, rho, c.kind);
    const DecayFit fit = decay_fit(f);
    CAPTURE(N);
    CAPTURE(to_string(c.kind));
    CHECK_FALSE(fit.inconclusive);
    CHECK(fit.expected == c.expected);
    CHECK(std::abs(fit.slope - c.expected) <= 0.1);
    const DecayFit refined = decay_fit(CorrectorField(*c.sol, rho, c.kind, {12, 2}));
    CHECK(std::abs(refined.slope - fit.slope) <= 0.02);
  }
}

TEST_CASE("linearity in rho") {
  const BubbleSolution& s = fixtures::pair_5_11_4();
  const QuadricBoundaryData r1 = rho_of({0.3, -0.2, 0.5, 0.1});
  QuadricBoundaryData r2 = r1;
  r2.rho *= 2.0;
  const CorrectorField f1(s, r1, CorrectorKind::phi0);
  const CorrectorField f2(s, r2, CorrectorKind::phi0);
  std::vector<CorrectorField> basis;
  for (int j = 0; j < 4; ++j) basis.emplace_back(s, QuadricBoundaryData{Eigen::VectorXd::Unit(4, j), {}, {}}, CorrectorKind::phi0);
  for (const auto& x : interior_points(5)) {
    const double v = f1(x);
    CHECK(std::abs(f2(x) - 2 * v) <= 1e-10 * std::abs(v));
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) sum += r1.rho[j] * basis[j](x);
    CHECK(std::abs(sum - v) <= 1e-10 * std::max(std::abs(v), 1e-3));
  }
}

TEST_CASE("harmonicity") {
  const CorrectorField f(fixtures::symmetric4(), rho_of({0.5, 0.2, 0.8}), CorrectorKind::phi0);
  for (int k = 0; k < 20; ++k) {
    Eigen::Vector4d x(std::cos(k), std::sin(2.0 * k), 0.5 * std::cos(3.0 * k), 0.5 + 0.2 * k);
    CHECK(harmonicity(f, x) <= 1e-3);
  }
}

TEST_CASE("c3 cross-check") {
  const C3Crosscheck c4 = c3_crosscheck(fixtures::symmetric4(), rho_of({0.5, 0.5, 0.5}));
  CHECK(c4.rhs == doctest::Approx(oracle::C3_4).epsilon(1e-4));
  CHECK(c4.relative_difference <= 1e-3);
  const BubbleSolution& a = fixtures::pair_5_11_4();
  CHECK(c3_crosscheck(a, rho_of({0.5, 0.5, 0.5, 0.5})).relative_difference <= 1e-3);
  const double e1 = c3_boundary_integral(a, rho_of({1, 0, 0, 0}));
  const double e2 = c3_boundary_integral(a, rho_of({0, 1, 0, 0}));
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
  const double r1 = c3_boundary_integral(a, rho_of({0.1, 0.2, 0.3, 0.4})) / 1.0;
  const double r2 = c3_boundary_integral(a, rho_of({-0.5, 0.0, 0.2, 1.3})) / 1.0;
  const double r3 = c3_boundary_integral(a, rho_of({2.0, 0.0, 0.0, 0.0})) / 2.0;
  CHECK(r1 == doctest::Approx(r3).epsilon(1e-6));
  CHECK(r2 == doctest::Approx(r3).epsilon(1e-6));
}

TEST_CASE("expansion order flags") {
  const ExpansionOrder o4 = expansion_order(critical_pair(4, 3, 3));
  CHECK(o4.sigma == 1);
  CHECK(o4.tau == 1);
  CHECK(o4.sigma_hat == 1);
  CHECK(o4.tau_hat == 1);
  CHECK(o4.remainder_u - o4.leading_u == doctest::Approx(1));
  const ExpansionOrder o5 = expansion_order(critical_pair(5, 2.75, 2));
  CHECK(o5.sigma == 1);
  CHECK(o5.tau == 1);
  CHECK(o5.sigma_hat == 0);
  CHECK(o5.tau_hat == 0);
  CHECK(o5.leading_u == doctest::Approx(-4.0 / 3 + 1));
  CHECK(o5.leading_v == doctest::Approx(-5.0 / 3 + 1));
}

TEST_CASE("two-term expansion") {
  const BubbleSolution& s = fixtures::symmetric4();
  const CorrectorField phi0(s, rho_of({0, 0, 0}), CorrectorKind::phi0);
  const CorrectorField psi0(s, rho_of({0, 0, 0}), CorrectorKind::psi0);
  const Eigen::Vector4d x(0.1, 0.0, 0.0, 0.2);
  const TwoTermValue v = two_term_expansion(phi0, psi0, 0.25, x);
  const auto raw = evaluate_scaled(ScaledBubble(s, 0.25, Eigen::VectorXd::Zero(4)), x);
  CHECK(v.u_approx == raw.first);
  CHECK(v.v_approx == raw.second);
  CHECK_THROWS_AS(two_term_expansion(phi0, psi0, 0.6, x), DomainError);
  CHECK_THROWS_AS(two_term_expansion(phi0, phi0, 0.25, x), DomainError);

  // gamma = q(N-2) - 3 = 0.6 < 1 for N = 5, q = 1.2.
  const BubbleSolution low = solve_ground_state(critical_pair(5, q_from_p(5, 1.2), 1.2));
  CHECK(gamma_of(low.pair) == doctest::Approx(0.6));
  const CorrectorField lphi(low, rho_of({0, 0, 0, 0}), CorrectorKind::phi0);
  const CorrectorField lpsi(low, rho_of({0, 0, 0, 0}), CorrectorKind::psi0);
  CHECK_THROWS_AS(two_term_expansion(lphi, lpsi, 0.25, Eigen::VectorXd::Unit(5, 4)), RefusalError);
}
