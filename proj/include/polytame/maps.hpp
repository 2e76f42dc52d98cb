#pragma once

// Variable maps that re-pose root-finding without expanding the transformed
// polynomial:
//
//   Moebius   v(z) = (z + c)^d p(a + b/(z + c)),   x = a + b/(z + c)
//   squaring  u(y) = (-1)^d p(sqrt y) p(-sqrt y) = prod (y - x_j^2)
//
// Both are evaluated pointwise through p, and their Newton ratios are
// transported from N_p.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "polytame/error.hpp"
#include "polytame/iterations.hpp"
#include "polytame/metrics.hpp"
#include "polytame/poly.hpp"
#include "polytame/solve.hpp"

namespace polytame {

class MobiusMap {
 public:
  MobiusMap(Complex a, Complex b, Complex c) : a_(a), b_(b), c_(c) {
    require(b != Complex{}, "Moebius map needs b != 0");
    require(is_finite(a) && is_finite(b) && is_finite(c), "Moebius parameters must be finite");
  }

  /// z = 1/x, turning p into its reverse polynomial.
  static MobiusMap reversion() { return {Complex{}, Complex{1.0, 0.0}, Complex{}}; }

  Complex a() const noexcept { return a_; }
  Complex b() const noexcept { return b_; }
  Complex c() const noexcept { return c_; }
  bool is_reversion() const noexcept { return a_ == Complex{} && b_ == Complex{1.0, 0.0} && c_ == Complex{}; }

  bool operator==(const MobiusMap&) const = default;

 private:
  Complex a_, b_, c_;
};

/// x = a + b/(z + c).
inline Complex mobius_forward(const MobiusMap& map, Complex z) {
  const Complex w = z + map.c();
  if (w == Complex{}) throw Error(Errc::pole, "z = -c");
  return map.a() + map.b() / w;
}

/// z = b/(x - a) - c.
inline Complex mobius_backward(const MobiusMap& map, Complex x) {
  const Complex gap = x - map.a();
  if (gap == Complex{}) throw Error(Errc::pole, "x = a");
  return map.b() / gap - map.c();
}

namespace detail {

inline Complex ipow(Complex base, int exponent) {
  Complex result{1.0, 0.0};
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

}  // namespace detail

/// v_{a,b,c} seen through p; coefficients of v are never computed.
class MobiusTarget {
 public:
  MobiusTarget(Polynomial p, MobiusMap map) : p_(std::move(p)), map_(map) {}

  const Polynomial& polynomial() const noexcept { return p_; }
  const MobiusMap& map() const noexcept { return map_; }
  int degree() const noexcept { return p_.degree(); }

  /// z^d coefficient of v, which is p(a).
  Complex leading() const {
    const Complex lead = eval(p_, map_.a());
    if (lead == Complex{}) throw Error(Errc::construction_failure, "p(a) = 0: v has degree below d");
    return lead;
  }

  Sample sample(Complex z, EvalCounter* c) const {
    const Complex w = shifted(z);
    const Complex pv = eval(p_, map_.a() + map_.b() / w, c);
    const Complex v = detail::ipow(w, p_.degree()) * pv;
    if (!is_finite(v)) throw Error(Errc::evaluation_overflow, "v(z) is not finite");
    return {v, std::abs(pv)};
  }

  Probe probe(Complex z, EvalCounter* c) const {
    const Complex w = shifted(z);
    const auto [pv, dpv] = eval_with_derivative(p_, map_.a() + map_.b() / w, c);
    if (c) ++c->ratio_calls;
    const Complex v = detail::ipow(w, p_.degree()) * pv;
    if (!is_finite(v)) throw Error(Errc::evaluation_overflow, "v(z) is not finite");
    if (pv == Complex{}) return {v, Complex{}, 0.0};
    const Complex ratio = static_cast<double>(p_.degree()) / w - map_.b() / (w * w) * (dpv / pv);
    return {v, ratio, std::abs(pv)};
  }

 private:
  Complex shifted(Complex z) const {
    const Complex w = z + map_.c();
    if (w == Complex{}) throw Error(Errc::pole, "z = -c");
    return w;
  }

  Polynomial p_;
  MobiusMap map_;
};

inline Complex mobius_eval(const Polynomial& p, const MobiusMap& map, Complex z, EvalCounter* c = nullptr) {
  return MobiusTarget(p, map).sample(z, c).value;
}

/// 1/N_v(z) = d/(z + c) - b/(z + c)^2 * p'(x)/p(x) with x = a + b/(z + c).
inline Complex mobius_newton_ratio_inverse(const Polynomial& p, const MobiusMap& map, Complex z,
                                           EvalCounter* c = nullptr) {
  const auto pr = MobiusTarget(p, map).probe(z, c);
  if (pr.value == Complex{}) throw Error(Errc::at_root, "v(z) = 0");
  return pr.ratio;
}

namespace detail {

// Largest |z| over the image of the circle |x| = radius, or nothing when the
// pole x = a lies on or inside it.
inline std::optional<double> image_radius(const MobiusMap& map, double radius, int samples = 512) {
  if (std::abs(map.a()) <= radius * (1.0 + 1e-12)) return std::nullopt;
  double m = std::abs(mobius_backward(map, Complex{}));
  for (int k = 0; k < samples; ++k) {
    const Complex x = std::polar(radius, 2.0 * std::numbers::pi * k / samples);
    m = std::max(m, std::abs(mobius_backward(map, x)));
  }
  return m;
}

// Sampling the boundary alone leaves a little slack between samples.
inline constexpr double kContainmentLimit = 0.99;

inline MobiusMap checked_containment(const Polynomial& p, MobiusMap map) {
  const auto r = image_radius(map, root_radius_bound(p));
  if (!r || !(*r < kContainmentLimit)) {
    throw Error(Errc::construction_failure, "map does not send the Cauchy disc into the unit disc");
  }
  return map;
}

}  // namespace detail

/// a = 2R, b = 0.9R, c = 0 for the Cauchy bound R. Every root has
/// R <= |x_j - a| <= 3R, so 0.3 <= |z_j| <= 0.9. The containment is re-checked
/// numerically on the boundary of the Cauchy disc.
inline MobiusMap choose_map_into_unit_disc(const Polynomial& p) {
  const double R = root_radius_bound(p);
  return detail::checked_containment(p, MobiusMap(Complex{2.0 * R, 0.0}, Complex{0.9 * R, 0.0}, Complex{}));
}

/// Random map with the same containment guarantee: |a| = 2R at a random
/// angle, |b| = 0.9R with a random phase, |c| <= 0.05.
template <class Rng>
MobiusMap random_map_into_unit_disc(const Polynomial& p, Rng& rng) {
  const double R = root_radius_bound(p);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Complex a = std::polar(2.0 * R, angle(rng));
  const Complex b = std::polar(0.9 * R, angle(rng));
  const Complex c = std::polar(0.05 * unit(rng), angle(rng));
  return detail::checked_containment(p, MobiusMap(a, b, c));
}

/// Radius of a circle in z-space enclosing the images of every root of p.
inline double mapped_root_radius(const Polynomial& p, const MobiusMap& map) {
  if (map.is_reversion() && p[0] != Complex{}) {
    double m = 0.0;
    for (int j = 1; j <= p.degree(); ++j) m = std::max(m, std::abs(p[static_cast<std::size_t>(j)] / p[0]));
    return 1.0 + m;
  }
  return detail::image_radius(map, root_radius_bound(p)).value_or(1.0);
}

/// Adds x-space roots and |p(x)| to a report produced in z-space.
inline void map_report_back(RunReport& report, const Polynomial& p, const MobiusMap& map) {
  for (auto& r : report.roots) {
    try {
      r.value = mobius_forward(map, r.iterate);
      r.input_residual = std::abs(eval(p, r.value));
    } catch (const Error& e) {
      r.converged = false;
      r.error = e.code();
      r.error_message = e.what();
    }
  }
}

/// Newton on v in z-space, with roots carried back through x = a + b/(z + c).
inline RunReport mapped_newton_run(const Polynomial& p, const MobiusMap& map, std::vector<Complex> init,
                                   const StoppingCriterion& stop, const RunOptions& opt = {}) {
  auto report = run_on(Method::newton, MobiusTarget(p, map), std::move(init), stop, opt);
  report.method = "newton-mobius";
  map_report_back(report, p, map);
  finalize_metrics(report);
  return report;
}

// ---------------------------------------------------------------------------
// Root squaring.

inline bool is_monic(const Polynomial& p) noexcept { return std::abs(p.leading() - 1.0) <= 1e-12; }

/// Divides every coefficient by p_d; the roots are unchanged.
inline Polynomial make_monic(const Polynomial& p) {
  const Complex lead = p.leading();
  std::vector<Complex> c(p.coeffs().begin(), p.coeffs().end());
  for (auto& cj : c) cj /= lead;
  c.back() = Complex{1.0, 0.0};
  return Polynomial(std::move(c));
}

/// u(y) seen through a monic p. The principal square root is used; u and its
/// Newton ratio are symmetric in sqrt(y) <-> -sqrt(y).
class SquaredTarget {
 public:
  explicit SquaredTarget(Polynomial p) : p_(std::move(p)) {
    if (!is_monic(p_)) throw Error(Errc::monicity, "root squaring needs a monic polynomial");
  }

  const Polynomial& polynomial() const noexcept { return p_; }
  int degree() const noexcept { return p_.degree(); }
  Complex leading() const noexcept { return Complex{1.0, 0.0}; }

  Sample sample(Complex y, EvalCounter* c) const {
    const Complex s = std::sqrt(y);
    const Complex plus = eval(p_, s, c);
    const Complex minus = eval(p_, -s, c);
    return {sign() * plus * minus, std::min(std::abs(plus), std::abs(minus))};
  }

  Probe probe(Complex y, EvalCounter* c) const {
    if (y == Complex{}) throw Error(Errc::at_origin, "y = 0");
    const Complex s = std::sqrt(y);
    const auto [plus, dplus] = eval_with_derivative(p_, s, c);
    const auto [minus, dminus] = eval_with_derivative(p_, -s, c);
    if (c) c->ratio_calls += 2;
    const Complex u = sign() * plus * minus;
    const double residual = std::min(std::abs(plus), std::abs(minus));
    if (plus == Complex{} || minus == Complex{}) return {u, Complex{}, residual};
    return {u, 0.5 * (dplus / plus - dminus / minus) / s, residual};
  }

 private:
  double sign() const noexcept { return p_.degree() % 2 ? -1.0 : 1.0; }

  Polynomial p_;
};

inline Complex squared_eval(const Polynomial& p, Complex y, EvalCounter* c = nullptr) {
  return SquaredTarget(p).sample(y, c).value;
}

/// 1/N_u(y) = (1/N_p(sqrt y) - 1/N_p(-sqrt y)) / (2 sqrt y).
inline Complex squared_newton_ratio_inverse(const Polynomial& p, Complex y, EvalCounter* c = nullptr) {
  const auto pr = SquaredTarget(p).probe(y, c);
  if (pr.value == Complex{}) throw Error(Errc::at_root, "u(y) = 0");
  return pr.ratio;
}

struct Recovered {
  Complex root;
  bool ambiguous = false;
};

/// Picks whichever of +-sqrt(y) has the smaller |p|; a tie within 1e-12
/// relative keeps the principal root and is flagged.
inline std::vector<Recovered> recover_roots_from_squares(const Polynomial& p, std::span<const Complex> ys) {
  std::vector<Recovered> out;
  out.reserve(ys.size());
  for (const auto& y : ys) {
    const Complex s = std::sqrt(y);
    const double plus = std::abs(eval(p, s));
    const double minus = std::abs(eval(p, -s));
    const double gap = std::abs(plus - minus);
    if (gap <= 1e-12 * std::max(plus, minus) || (plus == 0.0 && minus == 0.0)) {
      out.push_back({s, true});
    } else {
      out.push_back({plus < minus ? s : -s, false});
    }
  }
  return out;
}

/// Newton on u(y) for the monic form of p, then sign recovery. The monic
/// rescaling is recorded as a warning when it changed p.
inline RunReport squared_newton_run(const Polynomial& p, std::vector<Complex> init, const StoppingCriterion& stop,
                                    const RunOptions& opt = {}) {
  const Polynomial monic = is_monic(p) ? p : make_monic(p);
  auto report = run_on(Method::newton, SquaredTarget(monic), std::move(init), stop, opt);
  report.method = "newton-square";
  if (!is_monic(p)) report.warnings.push_back("coefficients divided by the leading coefficient before squaring");
  std::vector<Complex> ys;
  for (const auto& r : report.roots) ys.push_back(r.iterate);
  const auto recovered = recover_roots_from_squares(monic, ys);
  for (std::size_t i = 0; i < report.roots.size(); ++i) {
    auto& r = report.roots[i];
    r.value = recovered[i].root;
    r.ambiguous = recovered[i].ambiguous;
    r.input_residual = std::abs(eval(p, r.value));
    if (r.ambiguous) report.warnings.push_back("root " + std::to_string(i) + ": sign choice is a tie");
  }
  return report;
}

}  // namespace polytame
