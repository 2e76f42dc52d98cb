#pragma once

// run(): one entry point for plain and implicitly deflated Newton,
// Weierstrass and Ehrlich runs on any Target.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polytame/deflation.hpp"
#include "polytame/iterations.hpp"
#include "polytame/metrics.hpp"
#include "polytame/poly.hpp"

namespace polytame {

enum class Method { newton, weierstrass, ehrlich };

constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::newton: return "newton";
    case Method::weierstrass: return "weierstrass";
    case Method::ehrlich: return "ehrlich";
  }
  return "unknown";
}

/// Runs `method` on `target`. A non-empty tame set switches to implicit
/// deflation; tame roots must be given in the target's own variable.
/// Newton treats every initial point as an independent run; the simultaneous
/// methods need init.size() + tame.size() == target.degree().
template <Target T>
RunReport run_on(Method method, const T& target, std::vector<Complex> init, const StoppingCriterion& stop,
                 const RunOptions& opt, const TameSet& tame = {}, bool scaled = true) {
  std::string name(to_string(method));
  if (!tame.empty()) name += "-implicit";
  auto residual = [&](Complex z) { return target.sample(z, nullptr).residual; };
  const std::span<const Complex> frozen = tame.roots;

  if (method != Method::newton) {
    require(init.size() + tame.size() == static_cast<std::size_t>(target.degree()),
            "simultaneous methods need init.size() + tame.size() == d");
  }
  switch (method) {
    case Method::newton:
      return iterate(
          name,
          [&](std::span<const Complex> view, std::size_t i, EvalCounter* c) {
            return implicit_newton_pass(target, frozen, view[i], scaled, c);
          },
          residual, std::move(init), stop, opt);
    case Method::weierstrass:
      return iterate(
          name,
          [&](std::span<const Complex> view, std::size_t i, EvalCounter* c) {
            return weierstrass_pass(target, view, i, frozen, c);
          },
          residual, std::move(init), stop, opt, true);
    case Method::ehrlich:
      return iterate(
          name,
          [&](std::span<const Complex> view, std::size_t i, EvalCounter* c) {
            return ehrlich_pass(target, view, i, frozen, c);
          },
          residual, std::move(init), stop, opt, true);
  }
  throw Error(Errc::precondition, "unknown method");
}

/// Plain-polynomial run; roots are reported with |p(root)| as input residual.
inline RunReport run(Method method, const Polynomial& p, std::vector<Complex> init, const StoppingCriterion& stop,
                     const RunOptions& opt = {}, const TameSet& tame = {}, bool scaled = true) {
  if (!tame.empty()) {
    require(tame.size() < static_cast<std::size_t>(p.degree()), "tame set must leave at least one wild root");
  }
  auto report = run_on(method, PolynomialTarget(p), std::move(init), stop, opt, tame, scaled);
  for (auto& r : report.roots) r.input_residual = r.residual;
  return report;
}

}  // namespace polytame
