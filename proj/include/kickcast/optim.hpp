#ifndef KICKCAST_OPTIM_HPP
#define KICKCAST_OPTIM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

namespace kickcast {

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-8;  // infinity norm
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0;
  double gradient_norm = 0;  // infinity norm at x
  int iterations = 0;
  bool converged = false;
};

// Objective callback: returns f(x) and fills grad (always non-null here).
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

namespace detail {

// Strong Wolfe line search (bracket then zoom). Returns the accepted step in
// alpha and the objective/gradient at the new point; falls back to the best
// point seen when the interval collapses.
struct LineSearchState {
  double alpha = 0;
  double f = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  bool ok = false;
};

inline LineSearchState wolfe_line_search(const ObjectiveFn& fg, const Eigen::VectorXd& x0,
                                         double f0, const Eigen::VectorXd& g0,
                                         const Eigen::VectorXd& direction) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  constexpr int max_evals = 50;

  const double dphi0 = g0.dot(direction);
  LineSearchState st;
  st.x = x0;
  st.g = g0;
  st.f = f0;
  if (dphi0 >= 0) return st;  // not a descent direction

  auto eval = [&](double alpha, double& phi, double& dphi, Eigen::VectorXd& x,
                  Eigen::VectorXd& g) {
    x = x0 + alpha * direction;
    phi = fg(x, g);
    dphi = g.dot(direction);
  };

  double lo = 0, f_lo = f0, d_lo = dphi0;
  double hi = std::numeric_limits<double>::infinity(), f_hi = 0;
  double alpha = 1.0;
  double alpha_prev = 0, f_prev = f0;
  int evals = 0;
  Eigen::VectorXd x(x0.size()), g(x0.size());
  double phi = 0, dphi = 0;
  bool bracketed = false;

  // Expansion phase.
  while (evals < max_evals) {
    eval(alpha, phi, dphi, x, g);
    ++evals;
    if (!std::isfinite(phi)) {  // stepped outside the stable region
      hi = alpha;
      f_hi = phi;
      bracketed = true;
      break;
    }
    if (phi > f0 + c1 * alpha * dphi0 || (evals > 1 && phi >= f_prev)) {
      lo = alpha_prev;
      f_lo = f_prev;
      hi = alpha;
      f_hi = phi;
      bracketed = true;
      break;
    }
    if (std::abs(dphi) <= -c2 * dphi0) {
      st.alpha = alpha;
      st.f = phi;
      st.x = x;
      st.g = g;
      st.ok = true;
      return st;
    }
    if (dphi >= 0) {
      lo = alpha;
      f_lo = phi;
      d_lo = dphi;
      hi = alpha_prev;
      f_hi = f_prev;
      bracketed = true;
      break;
    }
    alpha_prev = alpha;
    f_prev = phi;
    alpha *= 2.0;
    if (alpha > 1e8) break;
  }
  if (!bracketed) return st;

  // Zoom phase: shrink [lo, hi] keeping the sufficient-decrease end at lo.
  (void)d_lo;
  (void)f_hi;
  while (evals < max_evals) {
    alpha = 0.5 * (lo + hi);
    if (!(std::abs(hi - lo) > 1e-14 * (1 + std::abs(lo)))) break;
    eval(alpha, phi, dphi, x, g);
    ++evals;
    if (!std::isfinite(phi) || phi > f0 + c1 * alpha * dphi0 || phi >= f_lo) {
      hi = alpha;
    } else {
      if (std::abs(dphi) <= -c2 * dphi0) {
        st.alpha = alpha;
        st.f = phi;
        st.x = x;
        st.g = g;
        st.ok = true;
        return st;
      }
      if (dphi * (hi - lo) >= 0) hi = lo;
      lo = alpha;
      f_lo = phi;
      // Track the best admissible point in case zoom never satisfies the
      // curvature condition within the eval budget.
      st.alpha = alpha;
      st.f = phi;
      st.x = x;
      st.g = g;
      st.ok = true;
    }
  }
  return st;
}

}  // namespace detail

// BFGS with a dense inverse-Hessian approximation. Suitable for smooth
// objectives with up to a few hundred parameters.
inline BfgsResult bfgs_minimize(const ObjectiveFn& fg, Eigen::VectorXd x0,
                                const BfgsOptions& opts = {}) {
  const auto n = x0.size();
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g(n);
  double f = fg(x0, g);

  BfgsResult res;
  res.x = x0;
  res.value = f;
  res.gradient_norm = g.lpNorm<Eigen::Infinity>();

  bool first_step = true;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter;
    if (res.gradient_norm < opts.gradient_tol) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd direction = -(h_inv * g);
    auto ls = detail::wolfe_line_search(fg, res.x, f, g, direction);
    if (!ls.ok || ls.alpha <= 0) {
      // Restart once with a steepest-descent step before giving up.
      if (first_step) break;
      h_inv.setIdentity();
      first_step = true;
      direction = -g;
      ls = detail::wolfe_line_search(fg, res.x, f, g, direction);
      if (!ls.ok || ls.alpha <= 0) break;
    }

    Eigen::VectorXd s = ls.x - res.x;
    Eigen::VectorXd y = ls.g - g;
    res.x = ls.x;
    f = ls.f;
    g = ls.g;
    res.value = f;
    res.gradient_norm = g.lpNorm<Eigen::Infinity>();

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_step) {
        h_inv *= sy / y.squaredNorm();
        first_step = false;
      }
      const double rho = 1.0 / sy;
      Eigen::MatrixXd outer = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h_inv = outer * h_inv * outer.transpose() + rho * s * s.transpose();
    }
  }
  res.converged = res.gradient_norm < opts.gradient_tol;
  return res;
}

}  // namespace kickcast

#endif
