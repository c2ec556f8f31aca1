// Command-line front end: classify, solve, params, bench, generate.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "nare/bench.hpp"
#include "nare/error.hpp"
#include "nare/generators.hpp"
#include "nare/params.hpp"
#include "nare/problem_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitClass = 2;
constexpr int kExitNoConv = 3;
constexpr int kExitIo = 4;

using namespace nare;

void print_opt(const char* key, const std::optional<double>& v) {
  if (v) std::printf("%-12s %.17g\n", key, *v);
}

void print_params(const ParamChoice& pc) {
  std::printf("%-12s %s\n", "strategy", strategy_name(pc.strategy));
  std::printf("%-12s %.17g\n", "t", pc.t);
  std::printf("%-12s %.17g\n", "gamma", pc.gamma);
  std::printf("%-12s %.17g%+.17gj\n", "alpha", pc.alpha.real(), pc.alpha.imag());
  std::printf("%-12s %.17g%+.17gj\n", "beta", pc.beta.real(), pc.beta.imag());
  std::printf("%-12s %.17g%+.17gj\n", "chi", pc.chi.real(), pc.chi.imag());
  const ParamDiagnostics& d = pc.diagnostics;
  print_opt("psi1", d.psi1);
  print_opt("psi2", d.psi2);
  print_opt("psi1_tilde", d.psi1_tilde);
  print_opt("psi2_tilde", d.psi2_tilde);
  print_opt("vartheta", d.vartheta);
  print_opt("c_star", d.c_star);
  print_opt("t_star", d.t_star);
  print_opt("gamma_star", d.gamma_star);
  print_opt("tau_star", d.tau_star);
  if (!pc.note.empty()) std::printf("%-12s %s\n", "note", pc.note.c_str());
}

int cmd_classify(const std::string& file, std::optional<double> omega) {
  NareProblem p = read_problem(file);
  if (omega) {
    p.omega = *omega;
    p.validate();
  }
  const ClassReport r = classify(p);
  std::printf("m %ld n %ld omega %.17g\n", static_cast<long>(p.m()), static_cast<long>(p.n()),
              p.omega);
  std::printf("z_pattern %d\nnonsingular_M %d\nmargins_positive %d\nmin_margin %.6g\n",
              r.is_z_pattern_Qomega, r.qomega_is_nonsingular_M, r.qomega_times_one_positive,
              r.margins.minCoeff());
  std::printf("verdict %s\n", verdict_name(r.verdict));
  return r.verdict == ClassReport::Verdict::HOmegaStrict ? kExitOk : kExitClass;
}

Method resolve_method(const std::string& name, bool preprocess) {
  if (!preprocess) return parse_method(name);
  // --preprocess selects the rotated variant of a doubling method.
  if (!name.empty() && name[0] == 'p') return parse_method(name);
  const Method m = parse_method("p" + name);
  return m;
}

int cmd_solve(const std::string& file, const std::string& method, bool preprocess, double tol,
              std::optional<int> max_iter, double zeta, double sor_omega, double aor_gamma,
              const std::string& out) {
  const NareProblem p = read_problem(file);
  const ClassReport cr = classify(p);
  if (cr.verdict != ClassReport::Verdict::HOmegaStrict) {
    std::fprintf(stderr, "warning: problem classifies as %s\n", verdict_name(cr.verdict));
  }
  MethodOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.zeta = zeta;
  opts.sor_omega = sor_omega;
  opts.aor_gamma = aor_gamma;
  const Method m = resolve_method(method, preprocess);
  const MethodRun run = run_method(p, m, opts);
  const SolveResult& r = run.result;
  std::printf("method %s\niterations %d\nnres %.6e\nconverged %d\nstop %s\nseconds %.3f\n",
              method_name(m), r.iterations, r.final_nres(), r.converged,
              stop_reason_name(r.stop_reason), run.seconds);
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!r.failure.empty()) std::fprintf(stderr, "failure: %s\n", r.failure.c_str());
  if (run.params) print_params(*run.params);
  if (!out.empty()) write_matrix(out, r.phi);
  return r.converged ? kExitOk : kExitNoConv;
}

int cmd_params(const std::string& file, const std::string& strategy, double zeta) {
  const NareProblem p = read_problem(file);
  const Method m = parse_method(strategy);
  if (!is_doubling(m)) throw BadParam(strategy + " is not a doubling strategy");
  const ParamChoice pc = choose_params(p, m, zeta);
  print_params(pc);
  std::printf("%-12s %.6g\n", "min_slack", min_feasibility_slack(p, pc));
  return kExitOk;
}

int cmd_bench(const std::string& example, Index n, const std::string& grid,
              const std::string& methods, const std::string& out, int jobs, bool quiet) {
  std::vector<BenchCase> cases;
  if (grid == "full" || grid == "acceptance") {
    cases = bench_preset(grid, example, n);
  } else {
    std::ifstream in(grid);
    if (!in) throw IoError("cannot open grid file " + grid);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    cases = bench_from_json(text);
  }
  if (!methods.empty()) {
    std::vector<Method> ms;
    std::string name;
    std::istringstream ss(methods);
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) ms.push_back(parse_method(name));
    }
    for (auto& c : cases) c.methods = ms;
  }
  BenchProgress progress;
  if (!quiet) {
    progress = [](const BenchRow& r) {
      std::fprintf(stderr, "%s n=%ld omega=%g eta=%g %-7s it=%3d nres=%.2e %6.2fs %s\n",
                   r.example.c_str(), static_cast<long>(r.n), r.omega, r.eta, r.method.c_str(),
                   r.it, r.nres, r.seconds, r.status.c_str());
    };
  }
  const auto rows = run_bench(cases, MethodOptions{}, jobs, progress);
  const std::string csv = bench_csv(rows);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out);
    f << csv;
  }
  for (const auto& r : rows)
    if (r.status != "ResidualMet") return kExitNoConv;
  return kExitOk;
}

int cmd_generate(const std::string& example, Index n, Index m, double omega, double xi,
                 double eta, double u, double margin, std::uint64_t seed, const std::string& out) {
  NareProblem p;
  if (example == "7.1") {
    p = gen_example_71(n, xi, eta, u, omega);
  } else if (example == "7.2") {
    p = gen_example_72(n, eta, omega);
  } else if (example == "random") {
    p = gen_random_homega(n, m, omega, margin, seed_from_env(seed));
  } else {
    throw BadParam("unknown example: " + example);
  }
  if (out.empty() || out == "-") {
    std::cout << problem_to_json(p) << '\n';
  } else {
    write_problem(out, p);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers for complex nonsymmetric algebraic Riccati equations"};
  app.require_subcommand(1);

  std::string file;
  std::optional<double> omega_override;
  auto* classify_cmd = app.add_subcommand("classify", "Check class membership of a problem file");
  classify_cmd->add_option("file", file, "Problem file (JSON)")->required();
  classify_cmd->add_option("--omega", omega_override, "Override omega");

  std::string method = "pSDAn";
  bool preprocess = false;
  double tol = kDefaultTol;
  std::optional<int> max_iter;
  double zeta = kDefaultZeta;
  double sor_omega = 1.0;
  double aor_gamma = 1.0;
  std::string out;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("file", file, "Problem file (JSON)")->required();
  solve_cmd->add_option("--method", method, "Method name")->capture_default_str();
  solve_cmd->add_flag("--preprocess", preprocess, "Use the rotated variant of a doubling method");
  solve_cmd->add_option("--tol", tol, "Residual threshold")->capture_default_str();
  solve_cmd->add_option("--max-iter", max_iter, "Iteration cap");
  solve_cmd->add_option("--zeta", zeta, "Safety factor of refined strategies")->capture_default_str();
  solve_cmd->add_option("--sor-omega", sor_omega, "SOR/AOR relaxation")->capture_default_str();
  solve_cmd->add_option("--aor-gamma", aor_gamma, "AOR acceleration")->capture_default_str();
  solve_cmd->add_option("--out", out, "Write the solution matrix here");

  std::string strategy = "pSDAn";
  auto* params_cmd = app.add_subcommand("params", "Print a doubling parameter choice");
  params_cmd->add_option("file", file, "Problem file (JSON)")->required();
  params_cmd->add_option("--strategy", strategy, "Doubling method name")->capture_default_str();
  params_cmd->add_option("--zeta", zeta, "Safety factor of refined strategies")->capture_default_str();

  std::string example;
  Index n = 512;
  std::string grid = "full";
  std::string methods;
  int jobs = 1;
  bool quiet = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run iteration-count benchmarks, emit CSV");
  bench_cmd->add_option("--example", example, "7.1 or 7.2 (both when omitted)");
  bench_cmd->add_option("--n", n, "Problem size for presets")->capture_default_str();
  bench_cmd->add_option("--grid", grid, "full, acceptance, or a JSON grid file")->capture_default_str();
  bench_cmd->add_option("--methods", methods, "Comma-separated override of the method list");
  bench_cmd->add_option("--out", out, "CSV output path (stdout when omitted)");
  bench_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  bench_cmd->add_flag("--quiet", quiet, "No progress on stderr");

  std::string gen_example = "random";
  Index gen_m = 4;
  double gen_omega = 0.5, xi = -1.0, eta = 4.0, u = 0.01, margin = 0.5;
  std::uint64_t seed = 1;
  auto* gen_cmd = app.add_subcommand("generate", "Write a generated problem file");
  gen_cmd->add_option("--example", gen_example, "7.1, 7.2 or random")->capture_default_str();
  gen_cmd->add_option("--n", n, "n (rows of D)")->capture_default_str();
  gen_cmd->add_option("--m", gen_m, "m (rows of A), random only")->capture_default_str();
  gen_cmd->add_option("--omega", gen_omega)->capture_default_str();
  gen_cmd->add_option("--xi", xi)->capture_default_str();
  gen_cmd->add_option("--eta", eta)->capture_default_str();
  gen_cmd->add_option("--u", u)->capture_default_str();
  gen_cmd->add_option("--margin", margin)->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Seed (RICCATI_SEED overrides)")->capture_default_str();
  gen_cmd->add_option("--out", out, "Output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify_cmd) return cmd_classify(file, omega_override);
    if (*solve_cmd)
      return cmd_solve(file, method, preprocess, tol, max_iter, zeta, sor_omega, aor_gamma, out);
    if (*params_cmd) return cmd_params(file, strategy, zeta);
    if (*bench_cmd) return cmd_bench(example, n, grid, methods, out, jobs, quiet);
    if (*gen_cmd)
      return cmd_generate(gen_example, n, gen_m, gen_omega, xi, eta, u, margin, seed, out);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const MarginViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitClass;
  } catch (const BadParam& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNoConv;
  }
  return kExitOk;
}
