#pragma once

// One root-finding job as the command-line tool runs it:
// normalize -> map -> iterate (with deflation) -> recover -> JSON report.
//
// Initial points and tame roots are given in the variable of the input
// polynomial and carried through normalization and the map. The automatic
// start is a circle in the iteration variable enclosing every root there.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polytame/deflation.hpp"
#include "polytame/error.hpp"
#include "polytame/iterations.hpp"
#include "polytame/maps.hpp"
#include "polytame/metrics.hpp"
#include "polytame/parse.hpp"
#include "polytame/poly.hpp"
#include "polytame/solve.hpp"

namespace polytame {

enum class Deflation { none, implicit, explicit_ };

constexpr std::string_view to_string(Deflation d) noexcept {
  switch (d) {
    case Deflation::none: return "none";
    case Deflation::implicit: return "implicit";
    case Deflation::explicit_: return "explicit";
  }
  return "unknown";
}

constexpr std::string_view to_string(Ordering o) noexcept {
  return o == Ordering::jacobi ? "jacobi" : "gauss-seidel";
}

struct MapSpec {
  enum class Kind { none, reverse, mobius_auto, mobius_random, mobius, square };
  Kind kind = Kind::none;
  Complex a, b, c;  // only for Kind::mobius
  std::string text = "none";
};

struct InitSpec {
  enum class Kind { automatic, circle, list };
  Kind kind = Kind::automatic;
  int count = 0;
  Complex center;
  double radius = 0.0;
  std::vector<Complex> points;
  std::string text = "auto";
};

struct JobConfig {
  std::string input = "-";
  Method method = Method::ehrlich;
  Deflation deflation = Deflation::none;
  MapSpec map;
  Ordering ordering = Ordering::jacobi;
  double residual_tol = 1e-12;
  double step_tol = 0.0;
  int max_iters = 500;
  std::vector<Complex> tame;
  InitSpec init;
  std::uint64_t seed = 0;
  bool normalize = false;
  bool partial_ok = false;
};

inline Method parse_method(std::string_view s) {
  if (s == "newton") return Method::newton;
  if (s == "weierstrass") return Method::weierstrass;
  if (s == "ehrlich") return Method::ehrlich;
  throw Error(Errc::precondition, "unknown method '" + std::string(s) + "'");
}

inline Deflation parse_deflation(std::string_view s) {
  if (s == "none") return Deflation::none;
  if (s == "implicit") return Deflation::implicit;
  if (s == "explicit") return Deflation::explicit_;
  throw Error(Errc::precondition, "unknown deflation '" + std::string(s) + "'");
}

inline Ordering parse_ordering(std::string_view s) {
  if (s == "jacobi") return Ordering::jacobi;
  if (s == "gauss-seidel") return Ordering::gauss_seidel;
  throw Error(Errc::precondition, "unknown ordering '" + std::string(s) + "'");
}

/// none | reverse | square | mobius | mobius:random | mobius:a,b,c
inline MapSpec parse_map_spec(std::string_view s) {
  MapSpec m;
  m.text = std::string(s);
  if (s == "none") return m;
  if (s == "reverse") {
    m.kind = MapSpec::Kind::reverse;
  } else if (s == "square") {
    m.kind = MapSpec::Kind::square;
  } else if (s == "mobius") {
    m.kind = MapSpec::Kind::mobius_auto;
  } else if (s == "mobius:random") {
    m.kind = MapSpec::Kind::mobius_random;
  } else if (s.starts_with("mobius:")) {
    const auto parts = split_top_level(s.substr(7));
    if (parts.size() != 3) throw Error(Errc::precondition, "mobius map needs three parameters a,b,c");
    m.kind = MapSpec::Kind::mobius;
    m.a = parse_complex(parts[0]);
    m.b = parse_complex(parts[1]);
    m.c = parse_complex(parts[2]);
    MobiusMap(m.a, m.b, m.c);  // validates b != 0
  } else {
    throw Error(Errc::precondition, "unknown map '" + std::string(s) + "'");
  }
  return m;
}

/// auto | circle(count,center,radius) | list(z1,z2,...) | file:PATH
inline InitSpec parse_init_spec(std::string_view s) {
  InitSpec spec;
  spec.text = std::string(s);
  auto inside = [&](std::string_view head) {
    if (!s.starts_with(head) || !s.ends_with(")")) return std::optional<std::string_view>{};
    return std::optional<std::string_view>{s.substr(head.size(), s.size() - head.size() - 1)};
  };
  if (s == "auto") return spec;
  if (auto body = inside("circle(")) {
    const auto parts = split_top_level(*body);
    if (parts.size() != 3) throw Error(Errc::precondition, "circle needs count,center,radius");
    spec.kind = InitSpec::Kind::circle;
    const Complex count = parse_complex(parts[0]);
    spec.count = static_cast<int>(count.real());
    if (count.imag() != 0.0 || count.real() != spec.count || spec.count < 1) {
      throw Error(Errc::precondition, "circle count must be a positive integer");
    }
    spec.center = parse_complex(parts[1]);
    const Complex radius = parse_complex(parts[2]);
    if (radius.imag() != 0.0 || !(radius.real() > 0.0)) throw Error(Errc::precondition, "circle radius must be positive");
    spec.radius = radius.real();
    return spec;
  }
  if (auto body = inside("list(")) {
    spec.kind = InitSpec::Kind::list;
    for (const auto& part : split_top_level(*body)) spec.points.push_back(parse_complex(part));
    return spec;
  }
  if (s.starts_with("file:")) {
    spec.kind = InitSpec::Kind::list;
    spec.points = parse_complex_list(read_text(std::string(s.substr(5))));
    if (spec.points.empty()) throw Error(Errc::precondition, "init file is empty");
    return spec;
  }
  throw Error(Errc::precondition, "unknown init spec '" + std::string(s) + "'");
}

/// Points named by an explicit init spec, or nothing for auto.
inline std::optional<std::vector<Complex>> explicit_starts(const InitSpec& spec) {
  switch (spec.kind) {
    case InitSpec::Kind::automatic: return std::nullopt;
    case InitSpec::Kind::circle: return circle_init(spec.count, spec.center, spec.radius);
    case InitSpec::Kind::list: return spec.points;
  }
  return std::nullopt;
}

struct JobResult {
  JobConfig config;
  int degree = 0;
  std::optional<MobiusMap> map;
  std::optional<RunReport> prior;  // roots found first and then used as the tame set
  RunReport report;
  std::vector<Complex> remainders;  // explicit deflation only

  std::size_t root_count() const noexcept { return report.roots.size() + (prior ? prior->roots.size() : 0); }
  std::size_t converged_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : report.roots) n += r.converged;
    if (prior) {
      for (const auto& r : prior->roots) n += r.converged;
    }
    return n;
  }
};

namespace detail {

inline void merge_into(RunReport& total, const RunReport& part, const std::string& label) {
  total.counter += part.counter;
  total.sweeps += part.sweeps;
  for (const auto& w : part.warnings) total.warnings.push_back(label + w);
  total.roots.insert(total.roots.end(), part.roots.begin(), part.roots.end());
}

// Newton from each start in turn; every converged root joins the tame set of
// the next run. Stops once `limit` roots are accepted.
template <Target T>
RunReport sequential_implicit_newton(const T& target, const std::vector<Complex>& starts,
                                     const StoppingCriterion& stop, const RunOptions& opt, std::size_t limit,
                                     std::vector<Complex>& accepted) {
  RunReport total;
  total.method = "newton-implicit";
  for (std::size_t k = 0; k < starts.size() && accepted.size() < limit; ++k) {
    const auto part = run_on(Method::newton, target, {starts[k]}, stop, opt, TameSet{accepted});
    merge_into(total, part, "start " + std::to_string(k) + ": ");
    if (part.roots[0].converged) accepted.push_back(part.roots[0].iterate);
  }
  finalize_metrics(total);
  return total;
}

// Same, with the found root divided out of the working polynomial each time.
inline RunReport sequential_explicit_newton(Polynomial& q, const std::vector<Complex>& starts,
                                            const StoppingCriterion& stop, const RunOptions& opt,
                                            std::size_t limit, std::vector<Complex>& accepted,
                                            std::vector<Complex>& remainders) {
  RunReport total;
  total.method = "newton-explicit";
  for (std::size_t k = 0; k < starts.size() && accepted.size() < limit; ++k) {
    const auto part = run(Method::newton, q, {starts[k]}, stop, opt);
    merge_into(total, part, "start " + std::to_string(k) + ": ");
    if (!part.roots[0].converged) continue;
    accepted.push_back(part.roots[0].iterate);
    if (q.degree() >= 2) {
      auto step = explicit_deflate(q, part.roots[0].iterate);
      q = std::move(step.quotient);
      remainders.push_back(step.remainder);
    } else {
      break;
    }
  }
  finalize_metrics(total);
  return total;
}

inline std::vector<Complex> need_starts(const std::optional<std::vector<Complex>>& given, std::size_t count,
                                        double radius, bool exact_count) {
  if (!given) return circle_init(static_cast<int>(count), Complex{}, radius);
  if (exact_count && given->size() != count) {
    throw Error(Errc::precondition, "simultaneous methods need " + std::to_string(count) +
                                        " initial points, got " + std::to_string(given->size()));
  }
  return *given;
}

struct Phases {
  std::optional<RunReport> prior;
  RunReport main;
};

// Deflation none/implicit on any target. `starts` and `tame` are already in
// the target's variable; `radius` encloses the target's roots.
template <Target T>
Phases solve_on(const JobConfig& cfg, const T& target, const std::optional<std::vector<Complex>>& starts,
                const std::vector<Complex>& tame, double radius, const StoppingCriterion& stop,
                const RunOptions& opt) {
  const auto d = static_cast<std::size_t>(target.degree());
  const bool simultaneous = cfg.method != Method::newton;
  Phases out;
  if (cfg.deflation == Deflation::implicit && tame.empty()) {
    std::vector<Complex> accepted;
    auto first = need_starts(starts, d, radius, false);
    if (!simultaneous) {
      out.main = sequential_implicit_newton(target, first, stop, opt, d, accepted);
      return out;
    }
    out.prior = sequential_implicit_newton(target, first, stop, opt, d / 2, accepted);
    out.main = run_on(cfg.method, target, circle_init(static_cast<int>(d - accepted.size()), Complex{}, radius), stop,
                      opt, TameSet{accepted});
    return out;
  }
  require(tame.size() < d, "the tame set must leave at least one wild root");
  const auto wild = d - tame.size();
  out.main = run_on(cfg.method, target, need_starts(starts, wild, radius, simultaneous), stop, opt, TameSet{tame});
  return out;
}

inline Phases solve_explicit(const JobConfig& cfg, const Polynomial& p,
                             const std::optional<std::vector<Complex>>& starts, const std::vector<Complex>& tame,
                             const StoppingCriterion& stop, const RunOptions& opt, std::vector<Complex>& remainders) {
  const auto d = static_cast<std::size_t>(p.degree());
  const bool simultaneous = cfg.method != Method::newton;
  require(tame.size() < d, "the tame set must leave at least one wild root");
  auto [q, rem] = explicit_deflate_all(p, tame);
  remainders = rem;
  Phases out;
  std::string suffix = "-explicit";
  if (tame.empty()) {
    std::vector<Complex> accepted;
    auto first = need_starts(starts, d, root_radius_bound(p), false);
    if (!simultaneous) {
      out.main = sequential_explicit_newton(q, first, stop, opt, d, accepted, remainders);
      return out;
    }
    out.prior = sequential_explicit_newton(q, first, stop, opt, d / 2, accepted, remainders);
    out.main = run(cfg.method, q, circle_init(q.degree(), Complex{}, root_radius_bound(q)), stop, opt);
  } else {
    const auto wild = static_cast<std::size_t>(q.degree());
    out.main = run(cfg.method, q, need_starts(starts, wild, root_radius_bound(q), simultaneous), stop, opt);
  }
  out.main.method += suffix;
  return out;
}

template <class Back>
void report_back(RunReport& report, const Polynomial& input, Back back) {
  for (auto& r : report.roots) {
    try {
      r.value = back(r.iterate);
      r.input_residual = std::abs(eval(input, r.value));
    } catch (const Error& e) {
      r.converged = false;
      r.error = e.code();
      r.error_message = e.what();
    }
  }
}

}  // namespace detail

inline void validate(const JobConfig& cfg) {
  if (cfg.map.kind == MapSpec::Kind::square) {
    require(cfg.method == Method::newton, "map=square needs method=newton");
  }
  if (cfg.deflation == Deflation::explicit_) {
    require(cfg.map.kind == MapSpec::Kind::none, "explicit deflation works on the input polynomial only (map=none)");
  }
  if (cfg.deflation == Deflation::none) {
    require(cfg.tame.empty(), "tame roots are only used with deflation");
  }
  StoppingCriterion(cfg.residual_tol, cfg.step_tol, cfg.max_iters);
}

inline JobResult run_job(const JobConfig& cfg, const Polynomial& input) {
  validate(cfg);
  JobResult result;
  result.config = cfg;
  result.degree = input.degree();
  const StoppingCriterion stop(cfg.residual_tol, cfg.step_tol, cfg.max_iters);
  RunOptions opt;
  opt.ordering = cfg.ordering;
  opt.seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);

  std::optional<Normalized> norm;
  if (cfg.normalize) norm = normalize_into_unit_disc(input);
  const Polynomial& work = norm ? norm->poly : input;
  auto to_work = [&](Complex x) { return norm ? norm->from_original(x) : x; };
  auto from_work = [&](Complex x) { return norm ? norm->to_original(x) : x; };

  auto transport = [](const std::vector<Complex>& xs, auto&& f) {
    std::vector<Complex> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(f(x));
    return out;
  };
  auto transport_opt = [&](const std::optional<std::vector<Complex>>& xs, auto&& f) {
    return xs ? std::optional<std::vector<Complex>>(transport(*xs, f)) : std::nullopt;
  };
  const auto starts_x = explicit_starts(cfg.init);
  const auto tame_w = transport(cfg.tame, to_work);
  const auto starts_w = transport_opt(starts_x, to_work);

  detail::Phases phases;
  using K = MapSpec::Kind;
  switch (cfg.map.kind) {
    case K::none: {
      if (cfg.deflation == Deflation::explicit_) {
        phases = detail::solve_explicit(cfg, work, starts_w, tame_w, stop, opt, result.remainders);
      } else {
        phases = detail::solve_on(cfg, PolynomialTarget(work), starts_w, tame_w, root_radius_bound(work), stop, opt);
      }
      for (auto* rep : {&phases.main, phases.prior ? &*phases.prior : nullptr}) {
        if (rep) detail::report_back(*rep, input, from_work);
      }
      break;
    }
    case K::reverse:
    case K::mobius_auto:
    case K::mobius_random:
    case K::mobius: {
      const MobiusMap map = cfg.map.kind == K::reverse        ? MobiusMap::reversion()
                            : cfg.map.kind == K::mobius_auto  ? choose_map_into_unit_disc(work)
                            : cfg.map.kind == K::mobius_random ? random_map_into_unit_disc(work, rng)
                                                               : MobiusMap(cfg.map.a, cfg.map.b, cfg.map.c);
      result.map = map;
      const MobiusTarget target(work, map);
      target.leading();  // fails early when v loses degree
      auto into = [&](Complex x) { return mobius_backward(map, x); };
      phases = detail::solve_on(cfg, target, transport_opt(starts_w, into), transport(tame_w, into),
                                mapped_root_radius(work, map), stop, opt);
      for (auto* rep : {&phases.main, phases.prior ? &*phases.prior : nullptr}) {
        if (rep) detail::report_back(*rep, input, [&](Complex z) { return from_work(mobius_forward(map, z)); });
      }
      break;
    }
    case K::square: {
      const Polynomial monic = is_monic(work) ? work : make_monic(work);
      auto into = [](Complex x) { return x * x; };
      const double r = root_radius_bound(monic);
      phases = detail::solve_on(cfg, SquaredTarget(monic), transport_opt(starts_w, into), transport(tame_w, into),
                                r * r, stop, opt);
      if (!is_monic(work)) {
        phases.main.warnings.push_back("coefficients divided by the leading coefficient before squaring");
      }
      for (auto* rep : {&phases.main, phases.prior ? &*phases.prior : nullptr}) {
        if (!rep) continue;
        std::vector<Complex> ys;
        for (const auto& root : rep->roots) ys.push_back(root.iterate);
        const auto rec = recover_roots_from_squares(monic, ys);
        for (std::size_t i = 0; i < ys.size(); ++i) {
          auto& root = rep->roots[i];
          root.value = from_work(rec[i].root);
          root.ambiguous = rec[i].ambiguous;
          root.input_residual = std::abs(eval(input, root.value));
          if (root.ambiguous) rep->warnings.push_back("root " + std::to_string(i) + ": sign choice is a tie");
        }
      }
      phases.main.method = "newton-square" + std::string(cfg.deflation == Deflation::implicit ? "-implicit" : "");
      break;
    }
  }
  if (cfg.map.kind == K::reverse || cfg.map.kind == K::mobius_auto || cfg.map.kind == K::mobius_random ||
      cfg.map.kind == K::mobius) {
    phases.main.method += "-mobius";
  }
  result.prior = std::move(phases.prior);
  result.report = std::move(phases.main);
  return result;
}

/// 0 all converged, 2 some did not, 4 none did.
inline int exit_status(const JobResult& r) {
  const auto total = r.root_count();
  const auto ok = r.converged_count();
  if (ok == total) return 0;
  if (ok == 0) return 4;
  return r.config.partial_ok ? 0 : 2;
}

// ---------------------------------------------------------------------------
// Report.

namespace detail {

using Json = nlohmann::ordered_json;

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json root_json(const RootReport& r, std::string_view phase, bool mapped) {
  Json j;
  j["phase"] = phase;
  j["re"] = r.value.real();
  j["im"] = r.value.imag();
  if (mapped) j["z"] = complex_json(r.iterate);
  j["residual"] = r.input_residual;
  j["iteration_residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["passes"] = r.passes;
  j["converged"] = r.converged;
  j["order_estimate"] = optional_json(r.order);
  j["perturbations"] = r.perturbations;
  j["ambiguous"] = r.ambiguous;
  j["error"] = r.error ? Json(std::string(to_string(*r.error))) : Json(nullptr);
  return j;
}

inline Json totals_json(const RunReport& r) {
  return Json{{"method", r.method},
              {"evals", r.counter.evaluations},
              {"passes", r.total_passes()},
              {"sweeps", r.sweeps},
              {"ratio_calls", r.counter.ratio_calls},
              {"divisions", r.counter.divisions},
              {"additions", r.counter.additions},
              {"alpha", r.alpha},
              {"order", optional_json(r.order)},
              {"efficiency", optional_json(r.efficiency)}};
}

}  // namespace detail

/// The report as a JSON document; wall-clock time is left out so equal
/// inputs give equal bytes.
inline nlohmann::ordered_json to_json(const JobResult& r) {
  using detail::Json;
  const auto& cfg = r.config;
  Json config{{"input", cfg.input},
              {"method", std::string(to_string(cfg.method))},
              {"deflate", std::string(to_string(cfg.deflation))},
              {"map", cfg.map.text},
              {"ordering", std::string(to_string(cfg.ordering))},
              {"tol", cfg.residual_tol},
              {"step_tol", cfg.step_tol},
              {"max_iters", cfg.max_iters},
              {"init", cfg.init.text},
              {"tame", Json::array()},
              {"seed", cfg.seed},
              {"normalize", cfg.normalize},
              {"partial_ok", cfg.partial_ok}};
  for (const auto& t : cfg.tame) config["tame"].push_back(detail::complex_json(t));

  Json doc;
  doc["format"] = "polytame-report/1";
  doc["config"] = std::move(config);
  doc["degree"] = r.degree;
  doc["map"] = r.map ? Json{{"a", detail::complex_json(r.map->a())},
                             {"b", detail::complex_json(r.map->b())},
                             {"c", detail::complex_json(r.map->c())}}
                     : Json(nullptr);
  const bool mapped = cfg.map.kind != MapSpec::Kind::none;
  Json roots = Json::array();
  std::vector<std::string> warnings;
  if (r.prior) {
    for (const auto& root : r.prior->roots) roots.push_back(detail::root_json(root, "prior", mapped));
    for (const auto& w : r.prior->warnings) warnings.push_back("prior: " + w);
  }
  for (const auto& root : r.report.roots) roots.push_back(detail::root_json(root, "main", mapped));
  warnings.insert(warnings.end(), r.report.warnings.begin(), r.report.warnings.end());
  doc["roots"] = std::move(roots);
  doc["totals"] = detail::totals_json(r.report);
  doc["prior_phase"] = r.prior ? detail::totals_json(*r.prior) : Json(nullptr);
  Json remainders = Json::array();
  for (const auto& x : r.remainders) remainders.push_back(std::abs(x));
  doc["diagnostics"] = Json{{"deflation_remainders", std::move(remainders)}};
  doc["warnings"] = warnings;
  doc["status"] = Json{{"roots", r.root_count()}, {"converged", r.converged_count()}, {"exit_code", exit_status(r)}};
  return doc;
}

}  // namespace polytame
