// polytame: find the roots of a polynomial read from a file or stdin.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polytame/job.hpp"

namespace {

constexpr int kInputError = 3;
constexpr int kNumericalFailure = 4;

bool is_input_error(polytame::Errc code) {
  using polytame::Errc;
  return code == Errc::precondition || code == Errc::parse_error || code == Errc::leading_zero ||
         code == Errc::monicity;
}

std::uint64_t parse_seed(const std::string& text, const char* origin) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw polytame::Error(polytame::Errc::precondition, std::string("bad seed in ") + origin + ": '" + text + "'");
  }
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial root-finding with Newton, Weierstrass and Ehrlich iterations"};
  std::string input = "-", method = "ehrlich", deflate = "none", map = "none", ordering = "jacobi";
  std::string init = "auto", tame_file, seed_text, json_file;
  double tol = 1e-12, step_tol = 0.0;
  int max_iters = 500;
  bool partial_ok = false, normalize = false;

  app.add_option("--input", input, "coefficient file, lowest degree first; '-' for stdin");
  app.add_option("--method", method, "newton | weierstrass | ehrlich");
  app.add_option("--deflate", deflate, "none | implicit | explicit");
  app.add_option("--map", map, "none | reverse | square | mobius | mobius:random | mobius:a,b,c");
  app.add_option("--ordering", ordering, "jacobi | gauss-seidel");
  app.add_option("--tol", tol, "residual tolerance on |p(z)|");
  app.add_option("--step-tol", step_tol, "relative step tolerance; 0 disables");
  app.add_option("--max-iters", max_iters, "iteration cap per root");
  app.add_option("--init", init, "auto | circle(count,center,radius) | list(z1,...) | file:PATH");
  app.add_option("--tame", tame_file, "file of accepted roots for deflation");
  app.add_option("--seed", seed_text, "64-bit seed; falls back to POLYTAME_SEED, then 0");
  app.add_flag("--partial-ok", partial_ok, "exit 0 when only some roots converged");
  app.add_flag("--normalize", normalize, "scale the variable so every root lies in the unit disc");
  app.add_option("--json", json_file, "write the report here instead of stdout; '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  polytame::JobConfig cfg;
  std::optional<polytame::Polynomial> poly;
  try {
    cfg.input = input;
    cfg.method = polytame::parse_method(method);
    cfg.deflation = polytame::parse_deflation(deflate);
    cfg.map = polytame::parse_map_spec(map);
    cfg.ordering = polytame::parse_ordering(ordering);
    cfg.residual_tol = tol;
    cfg.step_tol = step_tol;
    cfg.max_iters = max_iters;
    cfg.init = polytame::parse_init_spec(init);
    if (!tame_file.empty()) cfg.tame = polytame::parse_complex_list(polytame::read_text(tame_file));
    if (!seed_text.empty()) {
      cfg.seed = parse_seed(seed_text, "--seed");
    } else if (const char* env = std::getenv("POLYTAME_SEED"); env && *env) {
      cfg.seed = parse_seed(env, "POLYTAME_SEED");
    }
    cfg.normalize = normalize;
    cfg.partial_ok = partial_ok;
    polytame::validate(cfg);
    poly = polytame::parse_polynomial(polytame::read_text(input));
  } catch (const polytame::Error& e) {
    std::cerr << "polytame: " << e.what() << "\n";
    return kInputError;
  }

  polytame::JobResult result;
  try {
    result = polytame::run_job(cfg, *poly);
  } catch (const polytame::Error& e) {
    std::cerr << "polytame: " << e.what() << "\n";
    return is_input_error(e.code()) ? kInputError : kNumericalFailure;
  }

  const std::string text = polytame::to_json(result).dump(2) + "\n";
  if (json_file.empty() || json_file == "-") {
    std::cout << text;
  } else {
    std::ofstream out(json_file, std::ios::binary);
    if (!out || !(out << text)) {
      std::cerr << "polytame: cannot write '" << json_file << "'\n";
      return kInputError;
    }
  }
  const int status = polytame::exit_status(result);
  if (status != 0) {
    std::cerr << "polytame: " << result.converged_count() << " of " << result.root_count() << " roots converged\n";
  }
  return status;
}
