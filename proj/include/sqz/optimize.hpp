#pragma once

// Small derivative-free and Gauss-Newton style minimizers used by the OPO
// fitter. Dimension is tiny (2-3), so everything is dense and allocation
// heavy code paths are not a concern.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace sqz::optimize {

struct Minimum {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double initial_step = 0.25;
  double x_tolerance = 1e-12;
  double f_tolerance = 1e-28;
  std::size_t max_iterations = 4000;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). `f` maps Eigen::VectorXd -> double; non-finite values are
/// treated as +inf.
template <class F>
Minimum nelder_mead(F&& f, const Eigen::VectorXd& start, const NelderMeadOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(start.size());
  Minimum out;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][static_cast<Eigen::Index>(i)] += opt.initial_step;
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  for (; out.iterations < opt.max_iterations; ++out.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      size = std::max(size, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    if (size < opt.x_tolerance ||
        (std::isfinite(values[worst]) && values[worst] - values[best] < opt.f_tolerance)) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(start.size());
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                                               : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  out.x = simplex[static_cast<std::size_t>(it - values.begin())];
  out.value = *it;
  return out;
}

/// Central-difference Jacobian of a residual function r: R^n -> R^m.
template <class R>
Eigen::MatrixXd numeric_jacobian(R&& residuals, const Eigen::VectorXd& x, double rel_step = 1e-6) {
  const Eigen::VectorXd r0 = residuals(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (residuals(xp) - residuals(xm)) / (2.0 * h);
  }
  return jac;
}

struct LevenbergMarquardtOptions {
  std::size_t max_iterations = 200;
  double initial_damping = 1e-3;
  double step_tolerance = 1e-14;
};

/// Levenberg-Marquardt on 0.5 |r(x)|^2 with a numeric Jacobian. The returned
/// value is the sum of squared residuals. Non-finite residual vectors reject
/// the step.
template <class R>
Minimum levenberg_marquardt(R&& residuals, const Eigen::VectorXd& start,
                            const LevenbergMarquardtOptions& opt = {}) {
  Minimum out;
  auto ssr = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    ++out.evaluations;
    r = residuals(x);
    const double v = r.squaredNorm();
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd x = start, r;
  double value = ssr(x, r);
  double lambda = opt.initial_damping;
  for (; out.iterations < opt.max_iterations; ++out.iterations) {
    if (!std::isfinite(value) || value == 0.0) break;
    const Eigen::MatrixXd jac = numeric_jacobian(residuals, x);
    out.evaluations += 2 * static_cast<std::size_t>(x.size()) + 1;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;

    bool accepted = false;
    Eigen::VectorXd step;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      step = a.ldlt().solve(-grad);
      Eigen::VectorXd trial_r;
      const Eigen::VectorXd trial = x + step;
      const double trial_value = ssr(trial, trial_r);
      if (trial_value < value) {
        x = trial;
        r = trial_r;
        value = trial_value;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || step.cwiseAbs().maxCoeff() < opt.step_tolerance * (1.0 + x.cwiseAbs().maxCoeff())) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.value = value;
  return out;
}

}  // namespace sqz::optimize
