#pragma once

// Convergence-order estimation and the Ostrowski efficiency index
// eff = q^(1/alpha).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polytame/error.hpp"
#include "polytame/poly.hpp"

namespace polytame {

struct RootReport {
  Complex value;    // approximation in the space of the input polynomial
  Complex iterate;  // approximation in the space the iteration ran in
  double residual = std::numeric_limits<double>::infinity();  // stopping residual
  double input_residual = std::numeric_limits<double>::infinity();  // |p(value)| on the input
  int iterations = 0;  // applied updates
  int passes = 0;      // correction evaluations, including the confirming one
  std::vector<double> steps;
  bool converged = false;
  int perturbations = 0;
  std::optional<double> order;
  std::optional<Errc> error;
  std::string error_message;
  bool ambiguous = false;  // sign choice of a recovered square root was a tie
};

struct RunReport {
  std::string method;
  bool simultaneous = false;
  std::vector<RootReport> roots;
  EvalCounter counter;
  int sweeps = 0;
  double wall_seconds = 0.0;
  std::optional<double> order;
  double alpha = 0.0;
  std::optional<double> efficiency;
  std::vector<std::string> warnings;

  bool all_converged() const noexcept {
    return std::all_of(roots.begin(), roots.end(), [](const auto& r) { return r.converged; });
  }
  bool any_error() const noexcept {
    return std::any_of(roots.begin(), roots.end(), [](const auto& r) { return r.error.has_value(); });
  }
  std::uint64_t total_passes() const noexcept {
    std::uint64_t n = 0;
    for (const auto& r : roots) n += static_cast<std::uint64_t>(r.passes);
    return n;
  }
};

inline double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty list");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Median over consecutive triples of log(e[k+1]/e[k]) / log(e[k]/e[k-1]).
/// `steps` must already be the superlinear tail: positive and decreasing.
inline double estimate_order(std::span<const double> steps) {
  if (steps.size() < 4) throw Error(Errc::insufficient_data, "need at least 4 step magnitudes");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0) || !std::isfinite(steps[k])) {
      throw Error(Errc::insufficient_data, "step magnitudes must be positive and finite");
    }
    if (k > 0 && !(steps[k] < steps[k - 1])) {
      throw Error(Errc::stagnation, "step magnitudes are not decreasing");
    }
  }
  std::vector<double> ratios;
  for (std::size_t k = 1; k + 1 < steps.size(); ++k) {
    ratios.push_back(std::log(steps[k + 1] / steps[k]) / std::log(steps[k] / steps[k - 1]));
  }
  return median(std::move(ratios));
}

/// Picks the usable tail out of a raw step history: entries at rounding level
/// (below `floor`) and everything after them are dropped, then the longest
/// decreasing suffix is kept and cut to its last `window` entries.
inline std::vector<double> superlinear_tail(std::span<const double> steps, double floor,
                                            std::size_t window = 4) {
  std::size_t end = 0;
  while (end < steps.size() && steps[end] > floor) ++end;
  std::size_t begin = end;
  while (begin > 0 && (begin == end || steps[begin - 1] > steps[begin])) --begin;
  if (end - begin > window) begin = end - window;
  return {steps.begin() + static_cast<std::ptrdiff_t>(begin),
          steps.begin() + static_cast<std::ptrdiff_t>(end)};
}

/// Order estimate for one root's history, or nothing when the tail is too short.
inline std::optional<double> order_from_history(std::span<const double> steps, double magnitude) {
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + magnitude);
  const auto tail = superlinear_tail(steps, floor);
  if (tail.size() < 4) return std::nullopt;
  return estimate_order(tail);
}

inline double efficiency(double q, double alpha) {
  require(q >= 1.0, "efficiency needs q >= 1");
  require(alpha > 0.0, "efficiency needs alpha > 0");
  return std::pow(q, 1.0 / alpha);
}

/// Largest step taken by any root in each sweep: the error of the whole
/// approximation vector, which is what the order of a simultaneous method
/// describes.
inline std::vector<double> sweep_max_steps(const RunReport& report) {
  std::vector<double> out;
  for (const auto& r : report.roots) {
    if (out.size() < r.steps.size()) out.resize(r.steps.size(), 0.0);
    for (std::size_t k = 0; k < r.steps.size(); ++k) out[k] = std::max(out[k], r.steps[k]);
  }
  return out;
}

/// Fills per-root order estimates and the run-level alpha, q and efficiency.
/// alpha is measured: evaluations per correction pass per root. The run-level
/// q is the median per-root estimate for independent runs and the estimate
/// from sweep_max_steps for simultaneous ones, where each root's own history
/// also carries the errors of its neighbours.
inline void finalize_metrics(RunReport& report) {
  std::vector<double> orders;
  double magnitude = 0.0;
  for (auto& r : report.roots) {
    r.order = r.converged ? order_from_history(r.steps, std::abs(r.iterate)) : std::nullopt;
    if (r.order) orders.push_back(*r.order);
    magnitude = std::max(magnitude, std::abs(r.iterate));
  }
  const auto passes = report.total_passes();
  report.alpha = passes ? static_cast<double>(report.counter.evaluations) / static_cast<double>(passes) : 0.0;
  if (report.simultaneous) {
    const auto sweeps = sweep_max_steps(report);
    report.order = report.all_converged() ? order_from_history(sweeps, magnitude) : std::nullopt;
  } else {
    report.order = orders.empty() ? std::nullopt : std::optional<double>(median(orders));
  }
  report.efficiency.reset();
  if (report.order && *report.order >= 1.0 && report.alpha > 0.0) {
    report.efficiency = efficiency(*report.order, report.alpha);
  }
}

}  // namespace polytame
