#pragma once

// Implicit deflation. With tame roots x_{w+1}..x_d fixed, the quotient
// q(x) = p(x) / (p_d prod (x - x_j)) is never formed: Newton on q uses
// 1/N_q = 1/N_p - sum_j 1/(z - x_j), and the Weierstrass and Ehrlich
// corrections of q equal those of p once the tame roots join the node set as
// frozen nodes. Synthetic division is kept as an explicit comparator.

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "polytame/error.hpp"
#include "polytame/iterations.hpp"
#include "polytame/poly.hpp"

namespace polytame {

/// Accepted root approximations. Accuracy of wild roots found against this
/// set degrades with the error of its entries.
struct TameSet {
  std::vector<Complex> roots;

  std::size_t size() const noexcept { return roots.size(); }
  bool empty() const noexcept { return roots.empty(); }
};

namespace detail {

inline Complex tame_node_sum(Complex z, std::span<const Complex> tame, EvalCounter* c) {
  Complex s{};
  for (const auto& x : tame) {
    if (nodes_coincide(z, x)) throw Error(Errc::tame_collision, "approximation sits on a tame root");
    s += 1.0 / (z - x);
  }
  if (c && !tame.empty()) {
    const auto k = static_cast<std::uint64_t>(tame.size());
    c->divisions += k;
    c->additions += 2 * k - 1;
    c->evaluations += 1;
  }
  return s;
}

}  // namespace detail

/// One implicit Newton update z - N_q(z). `scaled` selects (1/r)/(1 - s/r)
/// over 1/(r - s); the two agree algebraically.
template <Target T>
Pass implicit_newton_pass(const T& target, std::span<const Complex> tame, Complex z, bool scaled,
                          EvalCounter* c) {
  if (tame.empty()) return newton_pass(target, z, c);
  const auto pr = target.probe(z, c);
  const Complex s = detail::tame_node_sum(z, tame, c);
  if (pr.value == Complex{}) return {z, pr.residual};
  const Complex r = pr.ratio;
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(r - s) < 1e3 * eps * (std::abs(r) + std::abs(s))) {
    throw Error(Errc::cancellation, "1/N_p and the tame sum cancel");
  }
  Complex nq;
  if (scaled) {
    if (r == Complex{}) throw Error(Errc::derivative_zero, "1/N_p vanishes; scaled form undefined");
    nq = (1.0 / r) / (1.0 - s / r);
    if (c) c->divisions += 3;
  } else {
    nq = 1.0 / (r - s);
    if (c) c->divisions += 1;
  }
  if (c) c->additions += 2;
  const Complex next = z - nq;
  if (!is_finite(next)) throw Error(Errc::cancellation, "implicit Newton correction is not finite");
  return {next, pr.residual};
}

inline Complex implicit_newton_step(const Polynomial& p, const TameSet& tame, Complex z, bool scaled = true,
                                    EvalCounter* c = nullptr) {
  if (tame.empty()) return newton_step(p, z, c);
  require(tame.size() < static_cast<std::size_t>(p.degree()), "tame set must leave at least one wild root");
  return implicit_newton_pass(PolynomialTarget(p), tame.roots, z, scaled, c).next;
}

namespace detail {

inline void require_wild_count(const Polynomial& p, const TameSet& tame, std::size_t wild) {
  require(wild >= 1, "at least one wild approximation is needed");
  require(wild + tame.size() == static_cast<std::size_t>(p.degree()),
          "wild approximations plus tame roots must number d");
}

}  // namespace detail

/// Weierstrass over the node set zs + tame, updating only zs.
inline std::vector<Complex> implicit_weierstrass_step(const Polynomial& p, const TameSet& tame,
                                                      std::span<const Complex> zs,
                                                      Ordering ordering = Ordering::jacobi,
                                                      EvalCounter* c = nullptr) {
  detail::require_wild_count(p, tame, zs.size());
  const PolynomialTarget target(p);
  return detail::sweep_once(zs, ordering, [&](std::span<const Complex> view, std::size_t i) {
    return weierstrass_pass(target, view, i, tame.roots, c);
  });
}

/// Ehrlich with the node sum running over the other wild entries and all tame roots.
inline std::vector<Complex> implicit_ehrlich_step(const Polynomial& p, const TameSet& tame,
                                                  std::span<const Complex> zs,
                                                  Ordering ordering = Ordering::jacobi,
                                                  EvalCounter* c = nullptr) {
  detail::require_wild_count(p, tame, zs.size());
  const PolynomialTarget target(p);
  return detail::sweep_once(zs, ordering, [&](std::span<const Complex> view, std::size_t i) {
    return ehrlich_pass(target, view, i, tame.roots, c);
  });
}

struct Deflated {
  Polynomial quotient;
  Complex remainder;  // p(root); nonzero when root is inexact
};

/// Synthetic division of p by (x - root).
inline Deflated explicit_deflate(const Polynomial& p, Complex root) {
  require(p.degree() >= 2, "explicit deflation needs degree >= 2");
  const auto c = p.coeffs();
  const std::size_t d = c.size() - 1;
  std::vector<Complex> q(d);
  q[d - 1] = c[d];
  for (std::size_t k = d - 1; k > 0; --k) q[k - 1] = c[k] + root * q[k];
  const Complex remainder = c[0] + root * q[0];
  return {Polynomial(std::move(q)), remainder};
}

/// Deflates by each root in turn; remainders are returned in the same order.
inline std::pair<Polynomial, std::vector<Complex>> explicit_deflate_all(const Polynomial& p,
                                                                       std::span<const Complex> roots) {
  Polynomial q = p;
  std::vector<Complex> remainders;
  for (const auto& r : roots) {
    auto step = explicit_deflate(q, r);
    q = std::move(step.quotient);
    remainders.push_back(step.remainder);
  }
  return {std::move(q), std::move(remainders)};
}

}  // namespace polytame
