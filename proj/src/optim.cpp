#include "semprobe/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "semprobe/kernels.hpp"

namespace semprobe::optim {
namespace {

constexpr double kArmijo = 1e-4;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H g.
std::vector<double> lbfgs_direction(const std::deque<Correction>& history, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(history.size());
  for (std::size_t k = history.size(); k-- > 0;) {
    const auto& c = history[k];
    alpha[k] = c.rho * kernels::dot(std::span<const double>(c.s), std::span<const double>(q));
    kernels::axpy(-alpha[k], std::span<const double>(c.y), std::span<double>(q));
  }
  if (!history.empty()) {
    const auto& last = history.back();
    const double yy = kernels::dot(std::span<const double>(last.y), std::span<const double>(last.y));
    const double gamma = 1.0 / (last.rho * yy);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& c = history[k];
    const double beta = c.rho * kernels::dot(std::span<const double>(c.y), std::span<const double>(q));
    kernels::axpy(alpha[k] - beta, std::span<const double>(c.s), std::span<double>(q));
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

std::string_view method_name(Method m) {
  return m == Method::kLbfgs ? "lbfgs" : "gd";
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kGradientTolerance:
      return "gradient";
    case StopReason::kFunctionTolerance:
      return "function";
    case StopReason::kMaxIterations:
      return "max-iterations";
    case StopReason::kLineSearchFailed:
      return "line-search";
  }
  return "max-iterations";
}

Result minimize(const Objective& objective, std::vector<double> x0, const Options& options) {
  const std::size_t n = x0.size();
  Result result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  double loss = objective(result.x, grad);
  ++result.evaluations;
  result.loss_history.push_back(loss);

  std::deque<Correction> history;
  std::vector<double> trial(n);
  std::vector<double> trial_grad(n);
  double gd_step = 1.0;

  result.reason = StopReason::kMaxIterations;
  if (max_abs(grad) <= options.gradient_tolerance) {
    result.reason = StopReason::kGradientTolerance;
    result.loss = loss;
    return result;
  }

  while (result.iterations < options.max_iterations) {
    std::vector<double> direction;
    double step = 1.0;
    if (options.method == Method::kLbfgs) {
      direction = lbfgs_direction(history, grad);
      if (history.empty()) step = std::min(1.0, 1.0 / max_abs(grad));
    } else {
      direction.assign(grad.begin(), grad.end());
      for (double& v : direction) v = -v;
      step = std::min(gd_step * 2.0, 1e6);
    }
    double slope = kernels::dot(std::span<const double>(grad), std::span<const double>(direction));
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      history.clear();
      direction.assign(grad.begin(), grad.end());
      for (double& v : direction) v = -v;
      slope = -kernels::dot(std::span<const double>(grad), std::span<const double>(grad));
      step = std::min(1.0, 1.0 / max_abs(grad));
    }

    bool accepted = false;
    double trial_loss = loss;
    for (std::size_t ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = result.x[i] + step * direction[i];
      trial_loss = objective(trial, trial_grad);
      ++result.evaluations;
      if (std::isfinite(trial_loss) && trial_loss <= loss + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.reason = StopReason::kLineSearchFailed;
      break;
    }
    ++result.iterations;
    gd_step = step;

    if (options.method == Method::kLbfgs) {
      Correction c{std::vector<double>(n), std::vector<double>(n), 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        c.s[i] = trial[i] - result.x[i];
        c.y[i] = trial_grad[i] - grad[i];
      }
      const double sy = kernels::dot(std::span<const double>(c.s), std::span<const double>(c.y));
      if (sy > 1e-10) {
        c.rho = 1.0 / sy;
        history.push_back(std::move(c));
        if (history.size() > options.memory) history.pop_front();
      }
    }

    const double previous = loss;
    result.x.swap(trial);
    grad.swap(trial_grad);
    loss = trial_loss;
    result.loss_history.push_back(loss);

    if (max_abs(grad) <= options.gradient_tolerance) {
      result.reason = StopReason::kGradientTolerance;
      break;
    }
    const double scale = std::max({std::abs(previous), std::abs(loss), 1.0});
    if (previous - loss <= options.function_tolerance * scale) {
      result.reason = StopReason::kFunctionTolerance;
      break;
    }
  }
  result.loss = loss;
  return result;
}

}  // namespace semprobe::optim
