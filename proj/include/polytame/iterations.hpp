#pragma once

// Newton, Weierstrass (Durand-Kerner) and Ehrlich (Aberth) iterations, the
// secular form s(x) = p_d + sum_i W(z_i)/(x - z_i), circle initialization and
// the sweep driver shared by every method in the library.

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polytame/error.hpp"
#include "polytame/metrics.hpp"
#include "polytame/poly.hpp"

namespace polytame {

/// Halts a root when |p(z)| <= residual_tol, or when |dz| <= step_tol (1 + |z|)
/// with step_tol > 0, or after max_iters updates.
class StoppingCriterion {
 public:
  StoppingCriterion(double residual_tol = 1e-12, double step_tol = 0.0, int max_iters = 500)
      : residual_tol_(residual_tol), step_tol_(step_tol), max_iters_(max_iters) {
    require(residual_tol > 0.0, "residual_tol must be positive");
    require(step_tol >= 0.0, "step_tol must be non-negative");
    require(max_iters >= 1, "max_iters must be at least 1");
  }

  double residual_tol() const noexcept { return residual_tol_; }
  double step_tol() const noexcept { return step_tol_; }
  int max_iters() const noexcept { return max_iters_; }

  bool residual_met(double residual) const noexcept { return residual <= residual_tol_; }
  bool step_met(double step, Complex z) const noexcept {
    return step_tol_ > 0.0 && step <= step_tol_ * (1.0 + std::abs(z));
  }

 private:
  double residual_tol_;
  double step_tol_;
  int max_iters_;
};

enum class Ordering { jacobi, gauss_seidel };

struct RunOptions {
  Ordering ordering = Ordering::jacobi;
  std::uint64_t seed = 0;
  int retry_budget = 3;  // perturbations per root per sweep
  double perturbation = 1e-6;
  unsigned threads = 1;  // Jacobi sweeps only
};

// ---------------------------------------------------------------------------
// Targets: anything the iterations can be pointed at. The input polynomial is
// one; the mapped polynomials in maps.hpp are others that are never expanded.

/// Value at a point plus the residual the stopping rule looks at.
struct Sample {
  Complex value;
  double residual;
};

/// Value, logarithmic derivative 1/N(z) (meaningful only when value != 0) and residual.
struct Probe {
  Complex value;
  Complex ratio;
  double residual;
};

template <class T>
concept Target = requires(const T& t, Complex z, EvalCounter* c) {
  { t.degree() } -> std::convertible_to<int>;
  { t.leading() } -> std::convertible_to<Complex>;
  { t.sample(z, c) } -> std::same_as<Sample>;
  { t.probe(z, c) } -> std::same_as<Probe>;
};

class PolynomialTarget {
 public:
  explicit PolynomialTarget(Polynomial p) : p_(std::move(p)) {}

  const Polynomial& polynomial() const noexcept { return p_; }
  int degree() const noexcept { return p_.degree(); }
  Complex leading() const noexcept { return p_.leading(); }

  Sample sample(Complex z, EvalCounter* c) const {
    const auto v = eval(p_, z, c);
    return {v, std::abs(v)};
  }
  Probe probe(Complex z, EvalCounter* c) const {
    const auto [v, dv] = eval_with_derivative(p_, z, c);
    if (c) ++c->ratio_calls;
    return {v, v == Complex{} ? Complex{} : dv / v, std::abs(v)};
  }

 private:
  Polynomial p_;
};

/// One correction of one approximation: where it goes next, and the residual
/// measured at the point it started from.
struct Pass {
  Complex next;
  double residual;
};

inline bool nodes_coincide(Complex a, Complex b) noexcept {
  const double gap = std::abs(a - b);
  return gap == 0.0 || gap <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
}

template <Target T>
Pass newton_pass(const T& target, Complex z, EvalCounter* c) {
  const auto pr = target.probe(z, c);
  if (pr.value == Complex{}) return {z, pr.residual};
  if (pr.ratio == Complex{}) throw Error(Errc::derivative_zero, "derivative vanishes at a non-root");
  const Complex next = z - 1.0 / pr.ratio;
  if (!is_finite(next)) throw Error(Errc::derivative_zero, "Newton correction is not finite");
  return {next, pr.residual};
}

/// Weierstrass correction of nodes[i] against every other entry of `nodes`
/// and every entry of `extra` (frozen nodes that are never updated).
template <Target T>
Pass weierstrass_pass(const T& target, std::span<const Complex> nodes, std::size_t i,
                      std::span<const Complex> extra, EvalCounter* c) {
  const Complex z = nodes[i];
  const auto s = target.sample(z, c);
  Complex denom = target.leading();
  auto multiply = [&](Complex other) {
    if (nodes_coincide(z, other)) throw Error(Errc::coincident_nodes, "two nodes coincide");
    denom *= z - other;
  };
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j != i) multiply(nodes[j]);
  }
  for (const auto& other : extra) multiply(other);
  tally(c, 1);
  if (s.value == Complex{}) return {z, s.residual};
  if (denom == Complex{} || !is_finite(denom)) {
    throw Error(Errc::coincident_nodes, "node product underflowed or overflowed");
  }
  const Complex next = z - s.value / denom;
  if (!is_finite(next)) throw Error(Errc::coincident_nodes, "Weierstrass correction is not finite");
  return {next, s.residual};
}

template <Target T>
Pass ehrlich_pass(const T& target, std::span<const Complex> nodes, std::size_t i,
                  std::span<const Complex> extra, EvalCounter* c) {
  const Complex z = nodes[i];
  const auto pr = target.probe(z, c);
  Complex node_sum{};
  auto add = [&](Complex other) {
    if (nodes_coincide(z, other)) throw Error(Errc::coincident_nodes, "two nodes coincide");
    node_sum += 1.0 / (z - other);
  };
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j != i) add(nodes[j]);
  }
  for (const auto& other : extra) add(other);
  tally(c, 1);
  if (pr.value == Complex{}) return {z, pr.residual};
  const Complex inverse = pr.ratio - node_sum;
  if (inverse == Complex{}) throw Error(Errc::zero_denominator, "1/E vanishes");
  const Complex next = z - 1.0 / inverse;
  if (!is_finite(next)) throw Error(Errc::zero_denominator, "Ehrlich correction is not finite");
  return {next, pr.residual};
}

// ---------------------------------------------------------------------------
// Single steps on a plain polynomial.

inline Complex newton_step(const Polynomial& p, Complex z, EvalCounter* c = nullptr) {
  const auto [v, dv] = eval_with_derivative(p, z, c);
  if (v == Complex{}) return z;
  if (dv == Complex{}) throw Error(Errc::derivative_zero, "derivative vanishes at a non-root");
  return z - v / dv;
}

namespace detail {

template <class PassFn>
std::vector<Complex> sweep_once(std::span<const Complex> zs, Ordering ordering, PassFn&& pass) {
  std::vector<Complex> out(zs.begin(), zs.end());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const std::span<const Complex> view = ordering == Ordering::jacobi ? zs : std::span<const Complex>(out);
    out[i] = pass(view, i).next;
  }
  return out;
}

inline void require_degree_nodes(const Polynomial& p, std::size_t count) {
  require(count == static_cast<std::size_t>(p.degree()), "simultaneous step needs d approximations");
}

}  // namespace detail

/// z_i - p(z_i) / (p_d prod_{j != i}(z_i - z_j)) for every i.
inline std::vector<Complex> weierstrass_step(const Polynomial& p, std::span<const Complex> zs,
                                             Ordering ordering = Ordering::jacobi,
                                             EvalCounter* c = nullptr) {
  detail::require_degree_nodes(p, zs.size());
  const PolynomialTarget target(p);
  return detail::sweep_once(zs, ordering, [&](std::span<const Complex> view, std::size_t i) {
    return weierstrass_pass(target, view, i, {}, c);
  });
}

/// z_i - 1 / (p'(z_i)/p(z_i) - sum_{j != i} 1/(z_i - z_j)) for every i.
inline std::vector<Complex> ehrlich_step(const Polynomial& p, std::span<const Complex> zs,
                                         Ordering ordering = Ordering::jacobi,
                                         EvalCounter* c = nullptr) {
  detail::require_degree_nodes(p, zs.size());
  const PolynomialTarget target(p);
  return detail::sweep_once(zs, ordering, [&](std::span<const Complex> view, std::size_t i) {
    return ehrlich_pass(target, view, i, {}, c);
  });
}

// ---------------------------------------------------------------------------
// Secular form.

/// s(x) = p_d + sum_i weights[i] / (x - nodes[i]) with p = l s for
/// l(x) = prod (x - nodes[i]). weights[i] = p_d W(z_i) = p(z_i) / l'(z_i),
/// which reduces to the Weierstrass correction W(z_i) for monic p.
struct SecularForm {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  Complex leading;
};

inline SecularForm secular_from_nodes(const Polynomial& p, std::span<const Complex> nodes) {
  detail::require_degree_nodes(p, nodes.size());
  SecularForm s{{nodes.begin(), nodes.end()}, {}, p.leading()};
  s.weights.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Complex denom = p.leading();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j == i) continue;
      if (nodes_coincide(nodes[i], nodes[j])) throw Error(Errc::coincident_nodes, "two nodes coincide");
      denom *= nodes[i] - nodes[j];
    }
    s.weights.push_back(p.leading() * (eval(p, nodes[i]) / denom));
  }
  return s;
}

inline Complex secular_eval(const SecularForm& s, Complex z) {
  Complex acc = s.leading;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (z == s.nodes[i]) throw Error(Errc::pole, "secular function evaluated at a node");
    acc += s.weights[i] / (z - s.nodes[i]);
  }
  return acc;
}

/// center + radius exp(2 pi i (j + 1/2) / count); the half step keeps the
/// points off the real axis.
inline std::vector<Complex> circle_init(int count, Complex center, double radius) {
  require(count >= 1, "circle_init needs count >= 1");
  require(radius > 0.0, "circle_init needs a positive radius");
  std::vector<Complex> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double angle = 2.0 * std::numbers::pi * (j + 0.5) / count;
    pts.push_back(center + std::polar(radius, angle));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Driver.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Direction depends only on (seed, root, sweep, attempt), so threading never
// changes which way a root is nudged.
inline Complex perturbation_direction(std::uint64_t seed, std::size_t root, int sweep, int attempt) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(root));
  key = splitmix64(key ^ static_cast<std::uint64_t>(sweep));
  key = splitmix64(key ^ static_cast<std::uint64_t>(attempt));
  std::mt19937_64 gen(key);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return std::polar(1.0, angle(gen));
}

struct RootOutcome {
  Pass pass{};
  int perturbations = 0;
  std::optional<Error> error;
  EvalCounter counter;
};

template <class PassFn>
RootOutcome correct_root(PassFn& pass, std::span<const Complex> view, std::size_t i, int sweep,
                         const RunOptions& opt) {
  RootOutcome out;
  std::vector<Complex> nudged;
  std::span<const Complex> current = view;
  for (int attempt = 0;; ++attempt) {
    try {
      out.pass = pass(current, i, &out.counter);
      return out;
    } catch (const Error& e) {
      if (!is_perturbable(e.code()) || attempt >= opt.retry_budget) {
        out.error = e;
        return out;
      }
      if (nudged.empty()) nudged.assign(view.begin(), view.end());
      const Complex z = nudged[i];
      nudged[i] = z + opt.perturbation * (1.0 + std::abs(z)) *
                          perturbation_direction(opt.seed, i, sweep, attempt);
      current = nudged;
      ++out.perturbations;
    }
  }
}

}  // namespace detail

/// Iterates z_i <- f_i(z_i) until every root has stopped. `pass(view, i, counter)`
/// computes one correction of view[i] and may read the other entries of view.
/// `residual(z)` is used only to refresh residuals of roots stopped by the step
/// rule; it is not counted as work.
template <class PassFn, class ResidualFn>
RunReport iterate(std::string method, PassFn pass, ResidualFn residual, std::vector<Complex> init,
                  const StoppingCriterion& stop, const RunOptions& opt, bool simultaneous = false) {
  require(!init.empty(), "at least one initial approximation is needed");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t m = init.size();

  RunReport report;
  report.method = std::move(method);
  report.simultaneous = simultaneous;
  report.roots.resize(m);
  std::vector<Complex> zs = std::move(init);
  std::vector<char> active(m, 1);
  std::vector<char> stale(m, 0);

  auto settle = [&](std::size_t i, detail::RootOutcome& out, std::vector<Complex>& target, int sweep) {
    auto& r = report.roots[i];
    report.counter += out.counter;
    r.perturbations += out.perturbations;
    if (out.perturbations) {
      report.warnings.push_back("root " + std::to_string(i) + ": perturbed " +
                                std::to_string(out.perturbations) + "x in sweep " + std::to_string(sweep));
    }
    if (out.error) {
      r.error = out.error->code();
      r.error_message = out.error->what();
      active[i] = 0;
      return;
    }
    ++r.passes;
    r.residual = out.pass.residual;
    if (stop.residual_met(out.pass.residual)) {
      r.converged = true;
      active[i] = 0;
      return;
    }
    if (sweep >= stop.max_iters()) {
      active[i] = 0;
      return;
    }
    const double step = std::abs(out.pass.next - zs[i]);
    target[i] = out.pass.next;
    ++r.iterations;
    r.steps.push_back(step);
    if (stop.step_met(step, out.pass.next)) {
      r.converged = true;
      stale[i] = 1;
      active[i] = 0;
    }
  };

  for (int sweep = 0; sweep <= stop.max_iters(); ++sweep) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < m; ++i) {
      if (active[i]) todo.push_back(i);
    }
    if (todo.empty()) break;
    ++report.sweeps;

    if (opt.ordering == Ordering::gauss_seidel) {
      for (auto i : todo) {
        auto out = detail::correct_root(pass, zs, i, sweep, opt);
        settle(i, out, zs, sweep);
      }
      continue;
    }

    std::vector<detail::RootOutcome> outcomes(todo.size());
    const std::span<const Complex> snapshot = zs;
    const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(todo.size())));
    if (workers == 1) {
      for (std::size_t k = 0; k < todo.size(); ++k) {
        outcomes[k] = detail::correct_root(pass, snapshot, todo[k], sweep, opt);
      }
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t k = w; k < todo.size(); k += workers) {
            outcomes[k] = detail::correct_root(pass, snapshot, todo[k], sweep, opt);
          }
        });
      }
    }
    std::vector<Complex> next = zs;
    for (std::size_t k = 0; k < todo.size(); ++k) settle(todo[k], outcomes[k], next, sweep);
    zs = std::move(next);
  }

  for (std::size_t i = 0; i < m; ++i) {
    auto& r = report.roots[i];
    r.iterate = zs[i];
    r.value = zs[i];
    if (stale[i]) {
      try {
        r.residual = residual(zs[i]);
      } catch (const Error&) {
        r.residual = std::numeric_limits<double>::infinity();
      }
    }
  }
  finalize_metrics(report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace polytame
