// Acceptance suite: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; with a number only that one does. Exit status is nonzero
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "polytame/deflation.hpp"
#include "polytame/job.hpp"
#include "polytame/maps.hpp"
#include "polytame/metrics.hpp"
#include "polytame/solve.hpp"

using namespace polytame;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Independent helpers, kept apart from the library code under test.

Complex random_in_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

std::vector<Complex> separated(std::mt19937_64& rng, int count, double radius, double gap) {
  std::vector<Complex> out;
  while (static_cast<int>(out.size()) < count) {
    const Complex z = random_in_disc(rng, radius);
    if (std::all_of(out.begin(), out.end(), [&](Complex w) { return std::abs(z - w) >= gap; })) out.push_back(z);
  }
  return out;
}

// Coefficients of lead * prod (x - r_j), lowest degree first.
std::vector<Complex> expand(const std::vector<Complex>& roots, Complex lead) {
  std::vector<Complex> c{lead};
  for (const auto& r : roots) {
    std::vector<Complex> next(c.size() + 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

double worst_pairing(std::vector<Complex> found, const std::vector<Complex>& want) {
  double worst = 0.0;
  for (const auto& w : want) {
    auto it = std::min_element(found.begin(), found.end(),
                               [&](Complex a, Complex b) { return std::abs(a - w) < std::abs(b - w); });
    if (it == found.end()) return INFINITY;
    worst = std::max(worst, std::abs(*it - w));
    found.erase(it);
  }
  return worst;
}

Complex fd_log_derivative(const std::function<Complex(Complex)>& f, Complex z) {
  const double h = 1e-6 * (1.0 + std::abs(z));
  return (f(z + h) - f(z - h)) / (2.0 * h * f(z));
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

struct Outcome {
  bool pass;
  std::string detail;
  std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------

Outcome efficiency_constants() {
  const double e2 = efficiency(2.0, 2.0), e3 = efficiency(3.0, 3.0);
  const bool ok = std::round(e2 * 1000) / 1000 == 1.414 && std::round(e3 * 1000) / 1000 == 1.442;
  char buf[128];
  std::snprintf(buf, sizeof buf, "eff(2,2)=%.5f eff(3,3)=%.5f", e2, e3);
  return {ok, buf, {}};
}

Outcome convergence_orders() {
  const auto t0 = Clock::now();
  struct Tally {
    int in_range = 0, converged = 0, without_estimate = 0;
    std::vector<double> vector_orders;
  };
  Tally tally[3];
  const Method methods[3] = {Method::newton, Method::weierstrass, Method::ehrlich};
  const double lo[3] = {1.7, 1.7, 2.5}, hi[3] = {2.3, 2.3, 3.5};
  std::mt19937_64 rng(20240601);
  const StoppingCriterion stop(1e-14, 0.0, 100);
  for (int instance = 0; instance < 20; ++instance) {
    const auto roots = separated(rng, 8, 1.0, 0.3);
    const Polynomial p(expand(roots, 1.0));
    // Every root starts 0.1 from its target in a random direction.
    std::vector<Complex> init;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (const auto& r : roots) init.push_back(r + std::polar(0.1, angle(rng)));
    for (int m = 0; m < 3; ++m) {
      const auto report = run(methods[m], p, init, stop, {});
      for (const auto& r : report.roots) {
        if (!r.converged) continue;
        ++tally[m].converged;
        if (!r.order) {
          ++tally[m].without_estimate;
        } else if (*r.order >= lo[m] && *r.order <= hi[m]) {
          ++tally[m].in_range;
        }
      }
      if (report.order) tally[m].vector_orders.push_back(*report.order);
    }
  }
  const double elapsed = seconds_since(t0);
  bool ok = elapsed < 5.0;
  std::string detail;
  std::vector<std::string> notes;
  const char* names[3] = {"newton", "weierstrass", "ehrlich"};
  for (int m = 0; m < 3; ++m) {
    const auto& t = tally[m];
    const double share = t.converged ? static_cast<double>(t.in_range) / t.converged : 0.0;
    ok = ok && share >= 0.9;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %d/%d (%.0f%%) ", names[m], t.in_range, t.converged, 100 * share);
    detail += buf;
    std::snprintf(buf, sizeof buf, "%s: %d converged roots had fewer than 4 usable steps", names[m],
                  t.without_estimate);
    notes.push_back(buf);
    if (!t.vector_orders.empty() && m > 0) {
      int hit = 0;
      for (double q : t.vector_orders) hit += q >= lo[m] && q <= hi[m];
      std::snprintf(buf, sizeof buf, "%s: run-level estimate from the sweep-max step: %zu of 20 runs produced one, %d in range",
                    names[m], t.vector_orders.size(), hit);
      notes.push_back(buf);
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "in %.2fs", elapsed);
  return {ok, detail + buf, notes};
}

Outcome one_step_exactness() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  int checks = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const int d = 2 + instance % 9;
    const auto roots = separated(rng, d, 1.0, 0.05);
    const Polynomial p(expand(roots, random_in_disc(rng, 1.0) + Complex(1.5, 0.0)));
    const TameSet tame{{roots.begin() + 1, roots.end()}};
    for (int k = 0; k < 5; ++k) {
      Complex z;
      do {
        z = random_in_disc(rng, 2.0);
      } while (std::any_of(tame.roots.begin(), tame.roots.end(), [&](Complex t) { return std::abs(z - t) < 0.1; }) ||
               z == roots[0]);
      const Complex next = implicit_newton_step(p, tame, z);
      worst = std::max(worst, std::abs(next - roots[0]));
      ++checks;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max error %.2e over %d starts on 100 instances", worst, checks);
  return {worst <= 1e-10, buf, {}};
}

Outcome deflation_identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const int d = 3 + instance % 10;
    const int wild = 1 + instance % (d - 1);
    const auto roots = separated(rng, d, 1.0, 0.1);
    const Complex lead = random_in_disc(rng, 1.0) + Complex(1.5, 0.0);
    const std::vector<Complex> wild_roots(roots.begin(), roots.begin() + wild);
    const TameSet tame{{roots.begin() + wild, roots.end()}};
    const Polynomial p(expand(roots, lead));
    const Polynomial q(expand(wild_roots, lead));
    std::vector<Complex> zs;
    for (const auto& r : wild_roots) zs.push_back(r + random_in_disc(rng, 0.05));
    const auto wi = implicit_weierstrass_step(p, tame, zs), we = weierstrass_step(q, zs);
    const auto ei = implicit_ehrlich_step(p, tame, zs), ee = ehrlich_step(q, zs);
    for (std::size_t i = 0; i < zs.size(); ++i) {
      worst = std::max(worst, rel(zs[i] - wi[i], zs[i] - we[i]));
      worst = std::max(worst, rel(zs[i] - ei[i], zs[i] - ee[i]));
    }
  }
  const double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "max relative gap %.2e on 50 instances in %.2fs", worst, elapsed);
  return {worst <= 1e-9 && elapsed < 5.0, buf, {}};
}

Outcome end_to_end_taming() {
  const auto t0 = Clock::now();
  const int d = 50;
  std::vector<Complex> all, tame, wild;
  for (int k = 0; k < d; ++k) all.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / d));
  for (int k = 0; k < d; ++k) (k % 2 ? wild : tame).push_back(all[static_cast<std::size_t>(k)]);
  std::vector<Complex> coeffs(d + 1);
  coeffs.front() = -1.0;
  coeffs.back() = 1.0;
  const Polynomial p(coeffs);
  std::mt19937_64 rng(5);
  std::vector<Complex> init;
  for (const auto& w : wild) init.push_back(w + random_in_disc(rng, 0.02));
  const StoppingCriterion stop(1e-13, 0.0, 200);
  const auto implicit = run(Method::ehrlich, p, init, stop, {}, TameSet{tame});
  std::vector<Complex> found;
  for (const auto& r : implicit.roots) found.push_back(r.value);
  const double err = worst_pairing(found, wild);

  const auto [q, remainders] = explicit_deflate_all(p, tame);
  const auto explicit_run = run(Method::ehrlich, q, init, stop, {});
  std::vector<Complex> found_explicit;
  double explicit_residual = 0.0, implicit_residual = 0.0, worst_remainder = 0.0;
  for (const auto& r : explicit_run.roots) {
    found_explicit.push_back(r.value);
    explicit_residual = std::max(explicit_residual, std::abs(eval(p, r.value)));
  }
  for (const auto& r : implicit.roots) implicit_residual = std::max(implicit_residual, std::abs(eval(p, r.value)));
  for (const auto& r : remainders) worst_remainder = std::max(worst_remainder, std::abs(r));
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "implicit max error %.2e, all converged=%s, in %.2fs", err,
                implicit.all_converged() ? "yes" : "no", elapsed);
  std::vector<std::string> notes;
  char note[200];
  std::snprintf(note, sizeof note, "implicit: max |p(x)| %.2e, %d sweeps", implicit_residual, implicit.sweeps);
  notes.push_back(note);
  std::snprintf(note, sizeof note,
                "explicit comparator: max |p(x)| %.2e, max error %.2e, max remainder %.2e, %d sweeps",
                explicit_residual, worst_pairing(found_explicit, wild), worst_remainder, explicit_run.sweeps);
  notes.push_back(note);
  return {err <= 1e-8 && implicit.all_converged() && elapsed < 10.0, buf, notes};
}

Outcome map_transport() {
  std::mt19937_64 rng(6);
  double worst_mobius = 0.0, worst_square = 0.0;
  int pairs = 0;
  while (pairs < 100) {
    const int d = 1 + pairs % 8;
    const auto roots = separated(rng, d, 1.0, 0.1);
    Polynomial p(expand(roots, random_in_disc(rng, 1.0) + Complex(1.5, 0.0)));
    Complex b;
    do {
      b = random_in_disc(rng, 2.0);
    } while (std::abs(b) < 0.2);
    const MobiusMap map(random_in_disc(rng, 3.0), b, random_in_disc(rng, 1.0));
    const Complex z = random_in_disc(rng, 2.0);
    bool clear = std::abs(z + map.c()) >= 1e-2;
    for (const auto& r : roots) clear = clear && (r == map.a() || std::abs(z - mobius_backward(map, r)) >= 1e-2);
    const Polynomial monic(expand(roots, 1.0));
    const Complex y = random_in_disc(rng, 1.5);
    clear = clear && std::abs(y) >= 1e-2;
    for (const auto& r : roots) clear = clear && std::abs(y - r * r) >= 1e-2;
    if (!clear) continue;
    worst_mobius = std::max(worst_mobius, rel(mobius_newton_ratio_inverse(p, map, z),
                                              fd_log_derivative([&](Complex t) { return mobius_eval(p, map, t); }, z)));
    worst_square = std::max(worst_square, rel(squared_newton_ratio_inverse(monic, y),
                                              fd_log_derivative([&](Complex t) { return squared_eval(monic, t); }, y)));
    ++pairs;
  }
  // Reversion: d/z - 1/(z^2 N_p(1/z)) with N_p = p/p' computed here directly.
  double worst_reversion = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto roots = separated(rng, 1 + k % 8, 1.0, 0.1);
    const auto c = expand(roots, 1.0);
    const Polynomial p(c);
    Complex z;
    do {
      z = random_in_disc(rng, 2.0);
    } while (std::abs(z) < 0.2 ||
             std::any_of(roots.begin(), roots.end(), [&](Complex r) { return std::abs(1.0 / z - r) < 1e-2; }));
    const Complex x = 1.0 / z;
    Complex v{}, dv{};
    for (std::size_t j = c.size(); j-- > 0;) {
      dv = dv * x + v;
      v = v * x + c[j];
    }
    const Complex closed = static_cast<double>(p.degree()) / z - 1.0 / (z * z * (v / dv));
    worst_reversion = std::max(worst_reversion, rel(mobius_newton_ratio_inverse(p, MobiusMap::reversion(), z), closed));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "moebius %.2e, squaring %.2e over %d pairs; reversion closed form %.2e",
                worst_mobius, worst_square, pairs, worst_reversion);
  return {worst_mobius <= 1e-5 && worst_square <= 1e-5 && worst_reversion <= 1e-12, buf, {}};
}

Outcome root_recovery() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    const auto roots = separated(rng, 8, 1.0, 0.1);
    bool distinct = true;
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) distinct = distinct && std::abs(roots[i] * roots[i] - roots[j] * roots[j]) > 1e-3;
    if (!distinct) continue;
    const Polynomial p(expand(roots, 1.0));
    std::vector<Complex> ys;
    for (const auto& r : roots) ys.push_back(r * r);
    const auto rec = recover_roots_from_squares(p, ys);
    for (std::size_t i = 0; i < roots.size(); ++i) worst = std::max(worst, std::abs(rec[i].root - roots[i]));
    ++done;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max recovered-root error %.2e on 50 instances", worst);
  return {worst <= 1e-8, buf, {}};
}

Outcome determinism() {
  std::mt19937_64 rng(8);
  int jobs = 0, identical = 0;
  const char* maps[] = {"none", "mobius:random", "reverse", "square", "mobius"};
  for (const char* map : maps) {
    for (auto deflation : {Deflation::none, Deflation::implicit}) {
      JobConfig cfg;
      cfg.map = parse_map_spec(map);
      cfg.method = std::string(map) == "square" ? Method::newton : Method::ehrlich;
      cfg.deflation = deflation;
      cfg.seed = rng();
      const Polynomial p(expand(separated(rng, 10, 1.0, 0.1), random_in_disc(rng, 1.0) + Complex(1.0, 0.0)));
      const auto first = to_json(run_job(cfg, p)).dump(2);
      const auto second = to_json(run_job(cfg, p)).dump(2);
      ++jobs;
      identical += first == second;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d/%d jobs byte-identical on re-run", identical, jobs);
  return {identical == jobs, buf, {}};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* title;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"efficiency constants", efficiency_constants},
      {"convergence orders", convergence_orders},
      {"one-step implicit Newton with linear quotient", one_step_exactness},
      {"implicit Weierstrass/Ehrlich equal explicit quotient", deflation_identities},
      {"x^50 - 1 with 25 tame roots", end_to_end_taming},
      {"map ratio transport", map_transport},
      {"sign recovery from squares", root_recovery},
      {"deterministic reports", determinism},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all = true;
  for (int k = 0; k < 8; ++k) {
    if (only && only != k + 1) continue;
    Outcome out;
    try {
      out = criteria[k].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what(), {}};
    }
    all = all && out.pass;
    std::printf("[%s] %d. %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].title, out.detail.c_str());
    for (const auto& note : out.notes) std::printf("       note: %s\n", note.c_str());
  }
  return all ? 0 : 1;
}
