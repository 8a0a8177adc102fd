#pragma once

// Embedded Dormand-Prince 5(4) stepper with a mixed absolute/relative error
// norm. The state type only needs Eigen-style arithmetic and cwiseAbs().

#include <algorithm>
#include <cmath>
#include <limits>

namespace hambubble {

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-30;
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 10'000'000;
};

enum class StepOutcome { reached, stopped, failed };

template <class State>
class DormandPrince45 {
 public:
  explicit DormandPrince45(StepControl control) : ctl_(control) {}

  long accepted() const { return accepted_; }
  long rejected() const { return rejected_; }

  /// Advances (t, y) to t_end. h carries the step-size suggestion between calls.
  /// stop(t, y) is consulted after every accepted step.
  template <class Rhs, class Stop>
  StepOutcome advance(Rhs&& f, double& t, State& y, double t_end, double& h, Stop&& stop) {
    // Dormand-Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    while (t < t_end) {
      if (accepted_ + rejected_ >= ctl_.max_steps) return StepOutcome::failed;
      h = std::min(h, ctl_.h_max);
      const bool last = (t + h >= t_end);
      const double step = last ? t_end - t : h;

      const State k1 = f(t, y);
      const State k2 = f(t + c2 * step, State(y + step * (a21 * k1)));
      const State k3 = f(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
      const State k4 = f(t + c4 * step, State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 = f(t + c5 * step, State(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 = f(t + step, State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      const State y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = f(t + step, y_new);
      const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double norm = 0.0;
      for (int i = 0; i < static_cast<int>(y.size()); ++i) {
        const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (!std::isfinite(norm)) {
        h = step * 0.1;
        ++rejected_;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) return StepOutcome::failed;
        continue;
      }
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        t = last ? t_end : t + step;
        y = y_new;
        ++accepted_;
        h = last ? std::max(h, step * factor) : step * factor;
        if (stop(t, y)) return StepOutcome::stopped;
      } else {
        h = step * std::max(factor, 0.1);
        ++rejected_;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) return StepOutcome::failed;
      }
    }
    return StepOutcome::reached;
  }

 private:
  StepControl ctl_;
  long accepted_ = 0;
  long rejected_ = 0;
};

}  // namespace hambubble
