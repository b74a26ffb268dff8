#pragma once

// Full-batch minimisers for the probe objectives.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace semprobe::optim {

enum class Method { kLbfgs, kGradientDescent };

enum class StopReason { kGradientTolerance, kFunctionTolerance, kMaxIterations, kLineSearchFailed };

std::string_view method_name(Method m);
std::string_view stop_reason_name(StopReason r);

struct Options {
  Method method = Method::kLbfgs;
  std::size_t max_iterations = 100;
  // Converged once max |gradient component| falls to this value.
  double gradient_tolerance = 1e-4;
  // Converged once the relative loss decrease of an iteration falls to this
  // value.
  double function_tolerance = 2.220446049250313e-09;
  std::size_t memory = 10;
  std::size_t max_line_search = 40;
};

// Writes the gradient into `grad` and returns the loss.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct Result {
  std::vector<double> x;
  double loss = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  StopReason reason = StopReason::kMaxIterations;
  // loss at the start point, then after every accepted iteration
  std::vector<double> loss_history;

  bool converged() const {
    return reason == StopReason::kGradientTolerance || reason == StopReason::kFunctionTolerance;
  }
};

// Every accepted step satisfies the Armijo condition, so the loss history is
// non-increasing.
Result minimize(const Objective& objective, std::vector<double> x0, const Options& options);

}  // namespace semprobe::optim
