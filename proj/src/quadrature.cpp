#include "hambubble/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <limits>
#include <queue>

#include "hambubble/errors.hpp"

namespace hambubble {

double sphere_measure(int k) {
  if (k < 0) throw DomainError("sphere_measure: k must be >= 0");
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

namespace {

GaussRule make_gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.x[n / 2] = 0.0;
  return g;
}

// Kronrod 15 / Gauss 7 abscissae and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWgk[7];
  double rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  out.evaluations = 15;
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int splits = 0;
  // Below ~50 ulp of the integral the Kronrod estimate only measures round-off.
  auto target = [&] {
    return std::max({opt.abs_tol, opt.rel_tol * std::abs(total), 50.0 * kEps * std::abs(total)});
  };
  while (error > target()) {
    if (splits >= opt.max_subdivisions) {
      out.converged = false;
      break;
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      heap.push(worst);
      out.converged = false;
      break;
    }
    const Segment left = gk15(f, worst.a, mid);
    const Segment right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Resum in left-to-right order so the value does not carry update round-off.
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  out.value = 0.0;
  out.error = 0.0;
  for (const auto& s : segs) {
    out.value += s.value;
    out.error += s.error;
  }
  return out;
}

QuadResult integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks,
                            const QuadOptions& opt) {
  QuadResult out;
  if (breaks.size() < 2) return out;
  // First pass fixes the scale, second pass refines panels that miss their share.
  std::vector<Segment> pass(breaks.size() - 1);
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    pass[i] = gk15(f, breaks[i], breaks[i + 1]);
    scale += std::abs(pass[i].value);
    out.evaluations += 15;
  }
  const double budget = std::max(opt.abs_tol, opt.rel_tol * scale) / static_cast<double>(pass.size());
  for (auto& seg : pass) {
    if (seg.error > budget) {
      QuadOptions local = opt;
      local.abs_tol = budget;
      local.rel_tol = 0.0;
      const QuadResult r = integrate(f, seg.a, seg.b, local);
      out.evaluations += r.evaluations;
      out.converged = out.converged && r.converged;
      seg.value = r.value;
      seg.error = r.error;
    }
    out.value += seg.value;
    out.error += seg.error;
  }
  return out;
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, const QuadOptions& opt) {
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double d = 1.0 - u;
    const double v = f(a + u / d);
    return v == 0.0 ? 0.0 : v / (d * d);
  };
  return integrate(g, 0.0, 1.0, opt);
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m) {
  // Fornberg's recursion.
  const int n = static_cast<int>(nodes.size());
  if (n <= m) throw DomainError("fd_weights: need more nodes than the derivative order");
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace hambubble
