#include "varw/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "varw/errors.hpp"
#include "varw/experiments.hpp"
#include "varw/limit.hpp"
#include "varw/model_io.hpp"
#include "varw/simulator.hpp"

namespace varw {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::string join(const Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt::format("{:.17g}", v[i]);
  }
  return s;
}

std::string join(const Counts& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw ModelError("cannot write output file '" + path + "'");
  return f;
}

OrderPolicy policy_from(const std::string& name) {
  const auto policy = parse_order_policy(name);
  if (!policy) throw ModelError("unknown order policy '" + name + "'");
  return *policy;
}

std::uint32_t houses_from(std::int64_t n) {
  if (n < 1 || n > std::numeric_limits<std::uint32_t>::max()) {
    throw ModelError("--n must be a positive 32-bit integer");
  }
  return static_cast<std::uint32_t>(n);
}

struct Options {
  std::string model;
  std::int64_t n = 0;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::uint64_t> seeds{kDefaultSeed};
  std::vector<std::int64_t> n_values;
  std::vector<std::int64_t> M;
  std::size_t trials = 0;
  double tol = kDefaultSolverTolerance;
  double a = 0.0;
  std::string order_policy = "fifo-house-queue";
  std::string out;
  bool strict = false;
  bool shared_sources = false;
};

int cmd_validate(const Options& o, std::ostream& out) {
  const ModelParams p = validate_model(load_model(o.model), o.strict);
  out << "valid: true\n"
      << "villages: " << p.num_villages() << '\n'
      << "subcritical: " << (is_subcritical(p) ? "true" : "false") << '\n';
  return kExitOk;
}

int cmd_spectral(const Options& o, std::ostream& out) {
  const ModelParams p = validate_model(load_model(o.model), false);
  const SpectralData s = compute_spectral(p);
  out << fmt::format("mu: {:.17g}\n", s.mu) << "eta: " << join(s.eta) << '\n'
      << fmt::format("eta_min: {:.17g}\n", s.eta_min) << "iterations: " << s.iterations << '\n';
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const ModelParams p = validate_model(load_model(o.model), true);
  const SpectralData s = compute_spectral(p);
  const LimitSolution sol = solve_fixed_point(p, s, o.tol);
  out << "m_star: " << join(sol.m_star) << '\n'
      << "s_star: " << join(sol.s_star) << '\n'
      << fmt::format("mu: {:.17g}\n", s.mu)
      << fmt::format("certified_eta_error: {:.17g}\n", sol.certified_eta_error)
      << "iterations: " << sol.iterations << '\n';
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const ModelParams p = validate_model(load_model(o.model), false);
  const std::uint32_t n = houses_from(o.n);
  StackSource src(p, n, o.seed);
  const SimResult sim = stabilize(p, n, src, policy_from(o.order_policy));
  const SingleLoopResult loop = single_loop(p, n, src, sim.M_star);
  const bool fixed = loop.Phi == sim.M_star && loop.S == sim.S_star;

  std::ostringstream text;
  text << "n: " << n << '\n'
       << "seed: " << o.seed << '\n'
       << "order_policy: " << o.order_policy << '\n'
       << "M_star: " << join(sim.M_star) << '\n'
       << "S_star: " << join(sim.S_star) << '\n'
       << "inflow: " << join(sim.inflow) << '\n'
       << "landlord_notices: " << join(sim.consumed.landlord) << '\n'
       << "fixed_point: " << (fixed ? "ok" : "FAILED") << '\n';
  out << text.str();
  if (!o.out.empty()) open_output(o.out) << text.str();
  return fixed ? kExitOk : kExitCheckFailed;
}

int cmd_single_loop(const Options& o, std::ostream& out) {
  const ModelParams p = validate_model(load_model(o.model), false);
  const std::uint32_t n = houses_from(o.n);
  StackSource src(p, n, o.seed);
  const SingleLoopResult r = single_loop(p, n, src, o.M);
  std::ostringstream text;
  text << "n: " << n << '\n'
       << "seed: " << o.seed << '\n'
       << "M: " << join(o.M) << '\n'
       << "Phi: " << join(r.Phi) << '\n'
       << "S: " << join(r.S) << '\n'
       << "I: " << join(r.I) << '\n'
       << "A: " << join(r.A) << '\n'
       << "Q: " << join(r.Q) << '\n'
       << "J: " << join(r.J) << '\n';
  out << text.str();
  if (!o.out.empty()) open_output(o.out) << text.str();
  return kExitOk;
}

int cmd_lln(const Options& o, std::ostream& out) {
  LLNConfig cfg;
  cfg.params = load_model(o.model);
  for (std::int64_t n : o.n_values) cfg.n_values.push_back(houses_from(n));
  cfg.seeds = o.seeds;
  cfg.tol = o.tol;
  cfg.policy = policy_from(o.order_policy);
  const LLNReport report = run_lln(cfg);

  const std::filesystem::path dir(o.out.empty() ? "lln_out" : o.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream rows(dir / "lln.csv");
    write_lln_csv(rows, report.rows);
    std::ofstream summary(dir / "lln_summary.csv");
    write_summary_csv(summary, report.summary);
    if (!rows || !summary) throw ModelError("cannot write into '" + dir.string() + "'");
  }
  out << "m_star: " << join(report.limit.m_star) << '\n'
      << "s_star: " << join(report.limit.s_star) << '\n'
      << "seeds: " << cfg.seeds.size() << '\n';
  write_summary_csv(out, report.summary);
  out << "rows: " << (dir / "lln.csv").string() << '\n'
      << "summary: " << (dir / "lln_summary.csv").string() << '\n';
  return kExitOk;
}

int cmd_concentration(const Options& o, std::ostream& out) {
  ConcentrationConfig cfg;
  cfg.params = load_model(o.model);
  cfg.n = houses_from(o.n);
  cfg.M = o.M;
  cfg.a = o.a;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  const ConcentrationReport r = run_concentration(cfg);
  write_report(out, r);
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    write_report(f, r);
  }
  return r.violation() ? kExitCheckFailed : kExitOk;
}

int cmd_kappa(const Options& o, std::ostream& out) {
  KappaConfig cfg;
  cfg.params = load_model(o.model);
  cfg.n = houses_from(o.n);
  cfg.M = o.M;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.shared_sources = o.shared_sources;
  const KappaReport r = run_kappa_equivalence(cfg);
  write_report(out, r);
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    write_report(f, r);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Village activated random walk: simulator and limit solver", "varw"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Model document (JSON)")->required();
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  };
  auto add_n = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "Houses per village")->required();
  };
  auto add_M = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--M", o.M, "Odometer, comma separated")->delimiter(',');
    if (required) opt->required();
  };
  auto add_out = [&](CLI::App* sub, const char* what) { sub->add_option("--out", o.out, what); };

  auto* validate = app.add_subcommand("validate", "Check a model document");
  add_model(validate);
  validate->add_flag("--strict", o.strict, "Also require sigma <= lambda/(1+lambda)");

  auto* spectral = app.add_subcommand("spectral", "Principal eigenvalue and eigenvector of P");
  add_model(spectral);

  auto* solve = app.add_subcommand("solve", "Solve the limit fixed-point system");
  add_model(solve);
  solve->add_option("--tol", o.tol, "Certified eta-norm error")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Stabilize one realization");
  add_model(simulate);
  add_n(simulate);
  add_seed(simulate);
  simulate->add_option("--order-policy", o.order_policy, "Toppling order")
      ->capture_default_str()
      ->check(CLI::IsMember({"fifo-house-queue", "village-round-robin", "lowest-index-first"}));
  add_out(simulate, "Also write the output to this file");

  auto* loop = app.add_subcommand("single-loop", "Evaluate the single-loop odometer at M");
  add_model(loop);
  add_n(loop);
  add_seed(loop);
  add_M(loop, true);
  add_out(loop, "Also write the output to this file");

  auto* lln = app.add_subcommand("lln", "Law-of-large-numbers sweep");
  add_model(lln);
  lln->add_option("--n-values", o.n_values, "Comma separated n grid")
      ->delimiter(',')
      ->required();
  lln->add_option("--seeds", o.seeds, "Comma separated seeds")
      ->delimiter(',')
      ->capture_default_str();
  lln->add_option("--tol", o.tol, "Solver tolerance")->capture_default_str();
  lln->add_option("--order-policy", o.order_policy, "Toppling order")
      ->capture_default_str()
      ->check(CLI::IsMember({"fifo-house-queue", "village-round-robin", "lowest-index-first"}));
  add_out(lln, "Output directory (default lln_out)");

  auto* conc = app.add_subcommand("concentration", "Single-loop concentration check");
  add_model(conc);
  add_n(conc);
  add_M(conc, true);
  conc->add_option("--a", o.a, "Deviation threshold")->required();
  conc->add_option("--trials", o.trials, "Independent realizations")->required();
  add_seed(conc);
  add_out(conc, "Report file");

  auto* kappa = app.add_subcommand("kappa-test", "Last-notice distributional test");
  add_model(kappa);
  add_n(kappa);
  add_M(kappa, true);
  kappa->add_option("--trials", o.trials, "Samples per distribution")->required();
  add_seed(kappa);
  kappa->add_flag("--shared-sources", o.shared_sources,
                  "Draw both samples of a trial from the same stacks");
  add_out(kappa, "Report file");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("varw");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*spectral) return cmd_spectral(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*loop) return cmd_single_loop(o, out);
    if (*lln) return cmd_lln(o, out);
    if (*conc) return cmd_concentration(o, out);
    if (*kappa) return cmd_kappa(o, out);
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const InvariantViolation& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace varw
