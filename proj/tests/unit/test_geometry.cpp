#include <cmath>
#include <random>

#include "doctest.h"
#include "hambubble/errors.hpp"
#include "hambubble/geometry.hpp"
#include "oracle_values.hpp"

using namespace hambubble;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

Eigen::MatrixXd rotation(int N, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = g(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

}  // namespace

TEST_CASE("sphere mean curvature is 1/R") {
  for (double R : {0.5, 1.0, 2.0, 5.0}) {
    const BoundarySurface s = BoundarySurface::sphere(4, R);
    for (const auto& dir : {vec({1, 0, 0, 0}), vec({0.5, 0.5, 0.5, 0.5}), vec({0.6, 0, -0.8, 0})}) {
      const CurvatureReport c = mean_curvature(s, R * dir);
      CHECK(std::abs(c.H - 1.0 / R) <= 1e-10);
      CHECK(std::abs(c.kappa.sum() / 3 - c.H) <= 1e-10);
    }
  }
}

TEST_CASE("quadric coefficients") {
  const QuadricBoundaryData u = quadric_coefficients(BoundarySurface::sphere(4, 1.0), vec({0, 1, 0, 0}));
  CHECK((u.rho - Eigen::Vector3d::Constant(0.5)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(u.frame.rows() == 4);
  CHECK(u.frame.cols() == 3);
  CHECK((u.normal - vec({0, -1, 0, 0})).norm() <= 1e-12);
  const BoundarySurface shell = BoundarySurface::shell(4, 1.0, 2.0);
  const QuadricBoundaryData r = quadric_coefficients(shell, vec({1, 0, 0, 0}));
  CHECK((r.rho - Eigen::Vector3d::Constant(-0.5)).cwiseAbs().maxCoeff() <= 1e-10);
  const BoundarySurface ell = BoundarySurface::ellipsoid(vec({2, 1, 1, 1}));
  const QuadricBoundaryData t = quadric_coefficients(ell, vec({2, 0, 0, 0}));
  CHECK((t.rho - Eigen::Vector3d::Constant(1.0)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("shell inner boundary") {
  const BoundarySurface shell = BoundarySurface::shell(4, 1.0, 2.0);
  const CurvatureReport c = mean_curvature(shell, vec({0, 0, 1, 0}));
  CHECK(std::abs(c.H + 1) <= 1e-10);
  CHECK(std::abs(mean_curvature(shell, vec({0, 2, 0, 0})).H - 0.5) <= 1e-10);
  const SurfacePoint p = project_to_surface(shell, vec({0, 0, 1.1, 0}));
  CHECK((p.nu - vec({0, 0, -1, 0})).norm() <= 1e-12);
  CHECK((p.frame.transpose() * p.nu).norm() <= 1e-12);
  CHECK((p.frame.transpose() * p.frame - Eigen::Matrix3d::Identity()).norm() <= 1e-12);
}

TEST_CASE("ellipsoid tip") {
  const BoundarySurface ell = BoundarySurface::ellipsoid(vec({2, 1, 1, 1}));
  const CurvatureReport c = mean_curvature(ell, vec({2, 0, 0, 0}));
  CHECK(std::abs(c.H - 2.0) <= 1e-8);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(c.kappa[i] - 2.0) <= 1e-8);
  CHECK(c.nondegenerate);
}

TEST_CASE("complement flips the sign") {
  const BoundarySurface ell = BoundarySurface::ellipsoid(vec({2, 1.5, 1, 1}));
  const BoundarySurface out = ell.complement();
  for (const auto& x : {vec({2, 0, 0, 0}), vec({0, 1.5, 0, 0}), vec({0, 0, 0, 1})}) {
    const CurvatureReport a = principal_curvatures(ell, x);
    const CurvatureReport b = principal_curvatures(out, x);
    CHECK(b.H == -a.H);
    CHECK((b.kappa + a.kappa.reverse()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("rigid motions leave H unchanged") {
  const BoundarySurface ell = BoundarySurface::ellipsoid(vec({2, 1.5, 1, 0.8}));
  const Eigen::MatrixXd R = rotation(4, 3);
  const Eigen::VectorXd t = vec({0.3, -1.0, 2.0, 0.5});
  const BoundarySurface moved = ell.moved(R, t);
  for (const auto& x : {vec({2, 0, 0, 0}), vec({0, 1.5, 0, 0}), vec({0, 0, 0.6, 0.48})}) {
    const SurfacePoint p = project_to_surface(ell, x);
    CHECK(std::abs(mean_curvature(moved, R * p.x + t).H - mean_curvature(ell, p.x).H) <= 1e-10);
  }
}

TEST_CASE("derivative consistency and quadric-H identity") {
  const BoundarySurface hole = BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1}));
  for (const auto& x : default_seeds(hole, 16)) {
    CHECK(hole.derivative_consistency(x) <= 1e-6);
    const QuadricBoundaryData q = quadric_coefficients(hole, x);
    CHECK(std::abs(q.H_local() - principal_curvatures(hole, x).H) <= 1e-10);
  }
}

TEST_CASE("singular points are rejected") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  const BoundarySurface s = BoundarySurface::quadric(A, Eigen::VectorXd::Zero(4), 0.0);
  CHECK_THROWS_AS(mean_curvature(s, Eigen::VectorXd::Zero(4)), GeometryError);
}

TEST_CASE("critical points on the ellipsoidal-hole domain") {
  const BoundarySurface hole = BoundarySurface::ellipsoidal_hole(3.0, vec({1.5, 1, 1, 1}));
  const CriticalSearch cs = find_critical_points(hole);
  REQUIRE(!cs.points.empty());
  const CriticalPoint& first = cs.points.front();
  CHECK(first.report.H == doctest::Approx(oracle::hole_H).epsilon(1e-8));
  int hits = 0;
  for (const auto& cp : cs.points) {
    if (std::abs(cp.report.H - oracle::hole_H) > 1e-6) continue;
    CHECK(std::abs(std::abs(cp.point.x[0]) - oracle::hole_xi) <= 1e-6);
    CHECK(cp.point.x.tail(3).norm() <= 1e-6);
    CHECK(cp.report.nondegenerate);
    CHECK(cp.minimum);
    ++hits;
  }
  CHECK(hits == 2);
  for (std::size_t i = 1; i < cs.points.size(); ++i) {
    CHECK(std::llround(cs.points[i - 1].report.H * 1e9) <= std::llround(cs.points[i].report.H * 1e9));
  }
}

TEST_CASE("convex ellipsoid has only positive critical values") {
  const CriticalSearch cs = find_critical_points(BoundarySurface::ellipsoid(vec({2, 1, 1, 1})));
  REQUIRE(!cs.points.empty());
  for (const auto& cp : cs.points) CHECK(cp.report.H > 0);
}

TEST_CASE("shell critical points are degenerate") {
  const CriticalSearch cs = find_critical_points(BoundarySurface::shell(4, 1.0, 2.0));
  REQUIRE(!cs.points.empty());
  for (const auto& cp : cs.points) CHECK_FALSE(cp.report.nondegenerate);
  CHECK(cs.points.front().report.H == doctest::Approx(-1).epsilon(1e-9));
}

TEST_CASE("surface JSON") {
  const auto spec = nlohmann::json::parse(
      R"({"family":"ellipsoidal_hole","dimension":4,"params":{"outer_radius":3,"semi_axes":[1.5,1,1,1]}})");
  const BoundarySurface s = surface_from_json(spec);
  CHECK(s.family() == SurfaceFamily::ellipsoidal_hole);
  CHECK(s.components() == 2);
  CHECK(principal_curvatures(s, vec({1.5, 0, 0, 0})).H == doctest::Approx(-1.5).epsilon(1e-10));
  const auto bad = nlohmann::json::parse(R"({"family":"torus","dimension":4,"params":{}})");
  CHECK_THROWS_AS(surface_from_json(bad), DomainError);
  const auto comp = nlohmann::json::parse(
      R"({"family":"sphere","dimension":3,"params":{"radius":2,"complement":true,"translation":[1,0,0]}})");
  CHECK(principal_curvatures(surface_from_json(comp), vec({3, 0, 0})).H == doctest::Approx(-0.5).epsilon(1e-12));
}
