// Copyright 2026 The uatraj Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "uatraj/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <limits>

namespace uatraj {
namespace {

struct Trial {
  double alpha = 0.0;
  double value = std::numeric_limits<double>::infinity();
  double slope = 0.0;  // directional derivative at alpha
  Eigen::VectorXd x;
  Eigen::VectorXd grad;

  bool finite() const { return std::isfinite(value); }
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const Eigen::VectorXd& x, double value,
             const Eigen::VectorXd& grad, const Eigen::VectorXd& dir,
             const LbfgsParams& p)
      : f_(f), x_(x), dir_(dir), p_(p), phi0_(value), slope0_(grad.dot(dir)) {}

  std::optional<Trial> run(double alpha0) {
    return p_.line_search == LineSearchKind::kWeakWolfe ? weak(alpha0)
                                                         : strong(alpha0);
  }

  // Strong-Wolfe search. Falls back to the best Armijo point found.
  std::optional<Trial> strong(double alpha0) {
    Trial prev;
    prev.alpha = 0.0;
    prev.value = phi0_;
    prev.slope = slope0_;
    double alpha = alpha0;
    for (int i = 0; i < p_.max_line_search; ++i) {
      Trial t = eval(alpha);
      if (!t.finite() || !armijo(t) || (i > 0 && t.value >= prev.value)) {
        return zoom(prev, t);
      }
      if (std::abs(t.slope) <= -p_.c2 * slope0_) return t;
      if (t.slope >= 0.0) return zoom(t, prev);
      prev = std::move(t);
      alpha *= 2.0;
    }
    if (prev.alpha > 0.0) return prev;
    return std::nullopt;
  }

  std::optional<Trial> weak(double alpha0) {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double alpha = alpha0;
    std::optional<Trial> best;
    for (int i = 0; i < p_.max_line_search; ++i) {
      Trial t = eval(alpha);
      if (!armijo(t)) {
        hi = alpha;
      } else {
        if (t.slope >= p_.c2 * slope0_) return t;
        lo = alpha;
        if (!best || t.value < best->value) best = t;
      }
      alpha = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo;
    }
    if (best && best->value < phi0_) return best;
    return std::nullopt;
  }

  Trial eval(double alpha) {
    Trial t;
    t.alpha = alpha;
    t.x = x_ + alpha * dir_;
    t.grad = Eigen::VectorXd::Zero(x_.size());
    t.value = f_(t.x, t.grad);
    if (!std::isfinite(t.value)) {
      t.value = std::numeric_limits<double>::infinity();
    } else {
      t.slope = t.grad.dot(dir_);
    }
    return t;
  }

  bool armijo(const Trial& t) const {
    return t.finite() && t.value <= phi0_ + p_.c1 * t.alpha * slope0_;
  }

 private:
  // `lo` satisfies sufficient decrease and has the lowest value seen.
  std::optional<Trial> zoom(Trial lo, Trial hi) {
    for (int j = 0; j < p_.max_line_search; ++j) {
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      const double width = b - a;
      if (width <= 1e-16 * std::max(1.0, b)) break;
      double alpha = 0.5 * (a + b);
      if (hi.finite()) {
        const double c = cubic_min(lo, hi);
        if (std::isfinite(c)) alpha = std::clamp(c, a + 0.1 * width, b - 0.1 * width);
      }
      Trial t = eval(alpha);
      if (!armijo(t) || t.value >= lo.value) {
        hi = std::move(t);
      } else {
        if (std::abs(t.slope) <= -p_.c2 * slope0_) return t;
        if (t.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(t);
      }
    }
    if (lo.alpha > 0.0 && lo.value < phi0_) return lo;
    return std::nullopt;
  }

  static double cubic_min(const Trial& t0, const Trial& t1) {
    const double da = t0.alpha - t1.alpha;
    if (da == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d1 = t0.slope + t1.slope - 3.0 * (t0.value - t1.value) / da;
    const double disc = d1 * d1 - t0.slope * t1.slope;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), t1.alpha - t0.alpha);
    const double denom = t1.slope - t0.slope + 2.0 * d2;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return t1.alpha - (t1.alpha - t0.alpha) * (t1.slope + d2 - d1) / denom;
  }

  const Objective& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& dir_;
  const LbfgsParams& p_;
  double phi0_;
  double slope0_;
};

Eigen::VectorXd two_loop(const Eigen::VectorXd& g,
                         const std::deque<Eigen::VectorXd>& s,
                         const std::deque<Eigen::VectorXd>& y) {
  Eigen::VectorXd q = g;
  const size_t m = s.size();
  std::vector<double> alpha(m), rho(m);
  for (size_t k = m; k-- > 0;) {
    rho[k] = 1.0 / y[k].dot(s[k]);
    alpha[k] = rho[k] * s[k].dot(q);
    q -= alpha[k] * y[k];
  }
  if (m > 0) q *= s.back().dot(y.back()) / y.back().squaredNorm();
  for (size_t k = 0; k < m; ++k) {
    const double beta = rho[k] * y[k].dot(q);
    q += (alpha[k] - beta) * s[k];
  }
  return -q;
}

}  // namespace

const char* to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::kMaxIterations: return "max_iterations";
    case LbfgsStatus::kConverged: return "converged";
    case LbfgsStatus::kStationary: return "stationary";
    case LbfgsStatus::kLineSearchFailure: return "line_search_failure";
    case LbfgsStatus::kInfeasibleStart: return "infeasible_start";
  }
  return "unknown";
}

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0,
                           const LbfgsParams& params, const IterateHook& hook) {
  LbfgsResult result;
  result.x = std::move(x0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(result.x.size());
  double fx = f(result.x, g);
  result.value = fx;
  result.history.push_back({0, fx, g.size() ? g.norm() : 0.0, 0.0, false, result.x});
  if (!std::isfinite(fx)) {
    result.status = LbfgsStatus::kInfeasibleStart;
    return result;
  }
  if (g.size() == 0 || g.lpNorm<Eigen::Infinity>() <= params.gradient_tolerance) {
    result.status = LbfgsStatus::kStationary;
    return result;
  }

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  result.status = LbfgsStatus::kMaxIterations;
  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    Eigen::VectorXd dir = two_loop(g, s_hist, y_hist);
    if (!(g.dot(dir) < 0.0) || !dir.allFinite()) {
      s_hist.clear();
      y_hist.clear();
      dir = -g;
    }
    const double alpha0 = s_hist.empty()
        ? params.initial_step / dir.lpNorm<Eigen::Infinity>()
        : 1.0;

    bool fallback = false;
    LineSearch ls(f, result.x, fx, g, dir, params);
    std::optional<Trial> accepted = ls.run(alpha0);
    if (!accepted) {
      // Backtracking along the steepest-descent direction.
      dir = -g;
      LineSearch bt(f, result.x, fx, g, dir, params);
      double alpha = params.initial_step / dir.lpNorm<Eigen::Infinity>();
      for (int k = 0; k < 2 * params.max_line_search; ++k, alpha *= 0.5) {
        Trial t = bt.eval(alpha);
        if (bt.armijo(t) && t.value < fx) {
          accepted = std::move(t);
          break;
        }
      }
      if (!accepted) {
        result.status = LbfgsStatus::kLineSearchFailure;
        break;
      }
      fallback = true;
      s_hist.clear();
      y_hist.clear();
    }

    Eigen::VectorXd s = accepted->x - result.x;
    Eigen::VectorXd y = accepted->grad - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      if (static_cast<int>(s_hist.size()) > params.history_size) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }

    const double f_prev = fx;
    result.x = std::move(accepted->x);
    g = std::move(accepted->grad);
    fx = accepted->value;
    if (hook && hook(result.x)) {
      const double f_new = f(result.x, g);
      if (std::isfinite(f_new)) fx = f_new;
      s_hist.clear();
      y_hist.clear();
    }
    result.value = fx;
    result.history.push_back({iter, fx, g.norm(), accepted->alpha, fallback, result.x});

    if (g.lpNorm<Eigen::Infinity>() <= params.gradient_tolerance) {
      result.status = LbfgsStatus::kStationary;
      break;
    }
    if (f_prev - fx <= params.relative_tolerance *
                           std::max(std::abs(f_prev), 1e-300)) {
      result.status = LbfgsStatus::kConverged;
      break;
    }
  }
  return result;
}

}  // namespace uatraj
