#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hambubble/errors.hpp"
#include "hambubble/reduced_energy.hpp"
#include "oracle_values.hpp"

using namespace hambubble;

namespace {

ReducedConstants oracle4() {
  ReducedConstants c;
  c.c1 = oracle::S4 / 4;
  c.c2 = oracle::c2_4;
  c.c3 = oracle::c3_4;
  c.c4 = oracle::c4_4;
  c.lambda = 0.5;
  return c;
}

double golden_section(const std::function<long double(long double)>& f, long double a, long double b) {
  const long double g = (std::sqrt(5.0L) - 1) / 2;
  long double x1 = b - g * (b - a), x2 = a + g * (b - a);
  long double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-15L * (a + b)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return static_cast<double>(0.5L * (a + b));
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

const ReducedConstants& solved4() {
  static const ReducedConstants c = [] {
    const EnergyConstants ec = energy_constants(fixtures::symmetric4());
    return reduced_constants(ec, fixtures::symmetric4().pair, ec.lambda_used);
  }();
  return c;
}

}  // namespace

TEST_CASE("theta") {
  const ReducedConstants c = oracle4();
  CHECK(theta(c, -1.0, 1.0) == doctest::Approx(c.c4).epsilon(1e-15));
  CHECK(theta(c, -1.0, oracle::d0_4) == doctest::Approx(oracle::theta_d0_4).epsilon(1e-12));
  for (double d = 0.01; d < 10; d *= 1.5) CHECK(theta(c, 0.0, d * 1.5) < theta(c, 0.0, d));
  CHECK_THROWS_AS(theta(c, -1.0, 0.0), DomainError);
}

TEST_CASE("d0 from the closed-form and the solved constants") {
  const StationaryScale s = d_star(oracle4(), -1.0);
  CHECK(s.d0 == doctest::Approx(oracle::d0_4).epsilon(1e-14));
  CHECK(s.theta_dd == doctest::Approx(oracle::c2_4 / (s.d0 * s.d0)).epsilon(1e-14));
  CHECK(d_star(oracle4(), -2.0).d0 == doctest::Approx(s.d0 / 2).epsilon(1e-15));
  const StationaryScale n = d_star(solved4(), -1.0);
  CHECK(std::abs(n.d0 - oracle::d0_4) <= 1e-8);
  CHECK(n.theta_at_d0 == doctest::Approx(oracle::theta_d0_4).epsilon(1e-6));
  CHECK_THROWS_AS(d_star(oracle4(), 0.0), DomainError);
  CHECK_THROWS_AS(d_star(oracle4(), 0.5), DomainError);
}

TEST_CASE("golden-section minimization agrees with d0") {
  for (const ReducedConstants& c : {oracle4(), solved4()}) {
    for (double H : {-1.0, -0.3, -2.5}) {
      const auto theta_ext = [&](long double d) { return -(long double)c.c4 * H * d - (long double)c.c2 * std::log(d); };
      const double d = golden_section(theta_ext, 1e-4L, 10.0L);
      CHECK(std::abs(d - d_star(c, H).d0) <= 1e-8 * d);
    }
  }
}

TEST_CASE("reduced energy evaluation") {
  const ReducedConstants c = oracle4();
  CHECK(c.c1 == doctest::Approx(8 * oracle::pi2 / 3).epsilon(1e-15));
  CHECK(reduced_energy_eval(c, 1e-9, 1.0, -1.0) == doctest::Approx(c.c1).epsilon(1e-5));
  const double d0 = d_star(c, -1.0).d0;
  const double eps = 0.01;
  const double h = 1e-3 * d0;
  const double fd = (reduced_energy_eval(c, eps, d0 - 2 * h, -1) - 8 * reduced_energy_eval(c, eps, d0 - h, -1) +
                     8 * reduced_energy_eval(c, eps, d0 + h, -1) - reduced_energy_eval(c, eps, d0 + 2 * h, -1)) /
                    (12 * h);
  CHECK(std::abs(fd) <= 1e-10 * std::abs(reduced_energy_eval(c, eps, d0, -1)));
  CHECK_THROWS_AS(reduced_energy_eval(c, 0.2, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(reduced_energy_eval(c, 0.0, 1.0, -1.0), DomainError);
}

TEST_CASE("stationarity and convexity over random draws") {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> pos(0.1, 500.0);
  std::uniform_real_distribution<double> neg(-5.0, -0.05);
  for (int k = 0; k < 20; ++k) {
    ReducedConstants c;
    c.c2 = pos(gen);
    c.c4 = pos(gen);
    const double H = neg(gen);
    const StationaryScale s = d_star(c, H);
    CHECK(s.d0 * (-c.c4 * H) == doctest::Approx(c.c2).epsilon(1e-14));
    const double h = 1e-3 * s.d0;
    const double fd = (theta(c, H, s.d0 - 2 * h) - 8 * theta(c, H, s.d0 - h) + 8 * theta(c, H, s.d0 + h) -
                       theta(c, H, s.d0 + 2 * h)) / (12 * h);
    CHECK(std::abs(fd) <= 1e-10 * std::abs(s.theta_at_d0) + 1e-12);
    CHECK(theta(c, H, s.d0 * 1.1) - s.theta_at_d0 >= 0);
    CHECK(theta(c, H, s.d0 * 0.9) - s.theta_at_d0 >= 0);
    CHECK(s.theta_dd > 0);
  }
}

TEST_CASE("blow-up prediction on the ellipsoidal-hole domain") {
  const BoundarySurface hole = BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1}));
  const ReducedConstants& c = solved4();
  const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  const BlowupPrediction p = predict_blowup(hole, c, critical_pair(4, 3, 3), eps);
  CHECK(std::abs(std::abs(p.xi0.point.x[0]) - oracle::hole_xi) <= 1e-6);
  CHECK(p.xi0.point.x.tail(3).norm() <= 1e-6);
  CHECK(p.H0 == doctest::Approx(oracle::hole_H).epsilon(1e-8));
  CHECK(p.d0 == doctest::Approx(oracle::d0_4 / 1.5).epsilon(1e-8));
  CHECK(p.d0 * (-c.c4 * p.H0) == doctest::Approx(c.c2).epsilon(1e-14));
  CHECK(p.theta_dd > 0);
  REQUIRE(p.delta_samples.size() == 3);
  for (const auto& [e, d] : p.delta_samples) CHECK(std::abs(d / e - p.d0) <= 1e-14 * p.d0);
  CHECK(p.regime.c2_sign == 1);
  CHECK(p.regime.admissible_H_sign == -1);
  CHECK(p.hypotheses.ok);
  CHECK(p.candidates.size() == 2);
}

TEST_CASE("critical points of H are stationary for the reduced energy") {
  const BoundarySurface hole = BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1}));
  const ReducedConstants& c = solved4();
  const SurfacePoint base = project_to_surface(hole, vec({1.5, 0, 0, 0}));
  auto reduced = [&](const Eigen::VectorXd& y) {
    const double H = principal_curvatures(hole, chart_point(hole, base, y)).H;
    return theta(c, H, d_star(c, H).d0);
  };
  const double h = 1e-4;
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(3, j) * h;
    const double g = (reduced(e) - reduced(-e)) / (2 * h);
    CHECK(std::abs(g) <= 1e-6);
  }
  const SurfacePoint off = project_to_surface(hole, vec({1.2, 0.5, 0.2, 0}));
  auto reduced_off = [&](const Eigen::VectorXd& y) {
    const double H = principal_curvatures(hole, chart_point(hole, off, y)).H;
    return theta(c, H, d_star(c, H).d0);
  };
  double g2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(3, j) * h;
    g2 += std::pow((reduced_off(e) - reduced_off(-e)) / (2 * h), 2);
  }
  CHECK(std::sqrt(g2) > 1e-3);
}

TEST_CASE("refusals") {
  const ReducedConstants& c = solved4();
  CHECK_THROWS_AS(predict_blowup(BoundarySurface::ellipsoid(vec({2, 1, 1, 1})), c, critical_pair(4, 3, 3), {1e-2}),
                  RefusalError);
  CHECK_THROWS_AS(predict_blowup(BoundarySurface::shell(4, 1, 2), c, critical_pair(4, 3, 3), {1e-2}), RefusalError);
  // q = 1.2 < 4/(N-2) for N = 5.
  CHECK_THROWS_AS(predict_blowup(BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1, 1})), c,
                                 critical_pair(5, q_from_p(5, 1.2), 1.2), {1e-2}),
                  RefusalError);
  CHECK_THROWS_AS(predict_blowup(BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1})), c,
                                 critical_pair(4, 3, 3), {0.5}),
                  DomainError);
}

TEST_CASE("ansatz field") {
  const BubbleSolution& s = fixtures::symmetric4();
  const BoundarySurface hole = BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1}));
  const BlowupPrediction p = predict_blowup(hole, solved4(), s.pair, {1e-2});
  const QuadricBoundaryData rho = quadric_coefficients(hole, p.xi0.point.x);
  const Eigen::VectorXd xi = p.xi0.point.x;
  const AnsatzField a = ansatz_field(p, s, rho, 1e-2, {xi});
  const AnsatzField b = ansatz_field(p, s, rho, 5e-3, {xi});
  REQUIRE(a.samples.size() == 1);
  REQUIRE(b.samples.size() == 1);
  const double a_exp = scaling_exponents(s.pair).a;
  CHECK(a.samples[0].u_bubble == doctest::Approx(std::pow(a.delta, -a_exp)).epsilon(1e-14));
  CHECK(b.samples[0].u_bubble / a.samples[0].u_bubble == doctest::Approx(std::pow(2.0, a_exp)).epsilon(1e-6));
  CHECK(a.samples[0].u > 0);

  const AnsatzField far = ansatz_field(p, s, rho, 1e-2, {xi + 10.0 * p.xi0.point.nu});
  CHECK(far.samples.empty());
  CHECK(far.notes.size() == 1);

  QuadricBoundaryData flat = rho;
  flat.rho.setZero();
  const Eigen::VectorXd inside = xi - 0.01 * p.xi0.point.nu;
  const AnsatzField f = ansatz_field(p, s, flat, 1e-2, {inside});
  REQUIRE(f.samples.size() == 1);
  CHECK(f.samples[0].u == f.samples[0].u_bubble);
  CHECK(f.samples[0].v == f.samples[0].v_bubble);
  const auto raw = evaluate_scaled(ScaledBubble(s, f.delta, xi), inside);
  CHECK(f.samples[0].u == doctest::Approx(raw.first).epsilon(1e-12));
}

TEST_CASE("landscape") {
  const BoundarySurface hole = BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1}));
  const ReducedConstants& c = solved4();
  const ThetaLandscape L = landscape(hole, c, vec({1.5, 0, 0, 0}), 0.2, 3, 0.01, 1.0, 5);
  CHECK(L.chart.size() == 27);
  CHECK(L.d.front() == doctest::Approx(0.01));
  CHECK(L.d.back() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < L.chart.size(); ++i)
    for (std::size_t k = 0; k < L.d.size(); ++k)
      CHECK(std::abs(L.theta(i, k) - theta(c, L.H[i], L.d[k])) <= 1e-12 * std::abs(L.theta(i, k)));
  REQUIRE(L.minimum_node.has_value());
  CHECK(L.chart[*L.minimum_node].norm() == 0.0);
  std::ostringstream csv;
  write_landscape_csv(L, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("d,y1,y2,y3,H,theta\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 27 * 5);
  const ThetaLandscape again = landscape(hole, c, vec({1.5, 0, 0, 0}), 0.2, 3, 0.01, 1.0, 5);
  std::ostringstream csv2;
  write_landscape_csv(again, csv2);
  CHECK(csv2.str() == text);
}
