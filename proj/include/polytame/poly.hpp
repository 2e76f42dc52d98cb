#pragma once

// Dense complex polynomials: Horner evaluation, root bounds and the
// shift/scale normalization that moves every root into the unit disc.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polytame/error.hpp"

namespace polytame {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Work tally for one run or one step. `evaluations` follows the unit-cost
/// convention where p, p', a node sum and a node product each count once.
struct EvalCounter {
  std::uint64_t evaluations = 0;
  std::uint64_t ratio_calls = 0;  // invocations of the 1/N_p black box
  std::uint64_t divisions = 0;
  std::uint64_t additions = 0;

  EvalCounter& operator+=(const EvalCounter& other) noexcept {
    evaluations += other.evaluations;
    ratio_calls += other.ratio_calls;
    divisions += other.divisions;
    additions += other.additions;
    return *this;
  }
};

inline void tally(EvalCounter* counter, std::uint64_t evaluations) noexcept {
  if (counter) counter->evaluations += evaluations;
}

/// p(x) = sum_j coeffs[j] x^j with a nonzero leading coefficient.
class Polynomial {
 public:
  explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    require(coeffs_.size() >= 2, "polynomial degree must be at least 1");
    for (const auto& c : coeffs_) {
      if (!is_finite(c)) throw Error(Errc::precondition, "non-finite coefficient");
    }
    if (coeffs_.back() == Complex{}) throw Error(Errc::leading_zero, "leading coefficient is zero");
  }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  Complex leading() const noexcept { return coeffs_.back(); }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex operator[](std::size_t j) const { return coeffs_[j]; }

  double max_coeff_abs() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<Complex> coeffs_;
};

/// Product form leading * prod (x - roots[i]).
struct RootList {
  std::vector<Complex> roots;
  Complex leading{1.0, 0.0};
};

struct ValueAndDerivative {
  Complex value;
  Complex derivative;
};

inline Complex eval(const Polynomial& p, Complex z, EvalCounter* counter = nullptr) {
  const auto c = p.coeffs();
  Complex acc = c.back();
  for (std::size_t j = c.size() - 1; j-- > 0;) acc = acc * z + c[j];
  tally(counter, 1);
  if (!is_finite(acc)) throw Error(Errc::evaluation_overflow, "p(z) is not finite");
  return acc;
}

// Fused Horner: the derivative rides along one step behind the value.
inline ValueAndDerivative eval_with_derivative(const Polynomial& p, Complex z,
                                               EvalCounter* counter = nullptr) {
  const auto c = p.coeffs();
  Complex value = c.back();
  Complex derivative{};
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    derivative = derivative * z + value;
    value = value * z + c[j];
  }
  tally(counter, 2);
  if (!is_finite(value) || !is_finite(derivative)) {
    throw Error(Errc::evaluation_overflow, "p(z) or p'(z) is not finite");
  }
  return {value, derivative};
}

/// 1/N_p(z) = p'(z)/p(z), the logarithmic derivative sum_j 1/(z - x_j).
inline Complex newton_ratio_inverse(const Polynomial& p, Complex z, EvalCounter* counter = nullptr) {
  const auto [value, derivative] = eval_with_derivative(p, z, counter);
  if (counter) ++counter->ratio_calls;
  if (value == Complex{}) throw Error(Errc::at_root, "p(z) = 0");
  return derivative / value;
}

inline Polynomial from_roots(const RootList& r) {
  require(!r.roots.empty(), "from_roots needs at least one root");
  require(r.leading != Complex{}, "leading coefficient must be nonzero");
  std::vector<Complex> c{r.leading};
  c.reserve(r.roots.size() + 1);
  for (const auto& root : r.roots) {
    c.push_back(c.back());
    for (std::size_t k = c.size() - 2; k > 0; --k) c[k] = c[k - 1] - root * c[k];
    c[0] = -root * c[0];
  }
  return Polynomial(std::move(c));
}

/// Cauchy bound: every root satisfies |x_j| < 1 + max_{j<d} |p_j / p_d|.
inline double root_radius_bound(const Polynomial& p) {
  const auto c = p.coeffs();
  const double lead = std::abs(p.leading());
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < c.size(); ++j) m = std::max(m, std::abs(c[j]) / lead);
  return 1.0 + m;
}

struct Normalized {
  Polynomial poly;
  Complex scale;
  Complex shift;

  /// Root of the original polynomial from a root of `poly`.
  Complex to_original(Complex x) const noexcept { return scale * x + shift; }
  Complex from_original(Complex x) const noexcept { return (x - shift) / scale; }
};

/// p~(x) = p(scale x + shift) with shift = 0 and scale the Cauchy bound, so
/// every root of p~ lies strictly inside the unit disc.
inline Normalized normalize_into_unit_disc(const Polynomial& p) {
  const double scale = root_radius_bound(p);
  std::vector<Complex> c(p.coeffs().begin(), p.coeffs().end());
  double power = 1.0;
  for (auto& cj : c) {
    cj *= power;
    power *= scale;
    if (!is_finite(cj)) throw Error(Errc::evaluation_overflow, "scaled coefficient overflow");
  }
  return {Polynomial(std::move(c)), Complex{scale, 0.0}, Complex{}};
}

inline std::vector<Complex> multipoint_eval(const Polynomial& p, std::span<const Complex> points,
                                            EvalCounter* counter = nullptr) {
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const auto& z : points) out.push_back(eval(p, z, counter));
  return out;
}

}  // namespace polytame
