#include "varw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "varw/errors.hpp"
#include "varw/random.hpp"

namespace varw {

std::size_t default_threads() {
  if (const char* env = std::getenv("VARW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t lane) {
  constexpr std::uint64_t kTrialTag = 5;
  return stream_key(base, kTrialTag, trial, lane);
}

namespace {

// Runs body(0..count-1) on up to `threads` workers. Each task writes only its
// own output slot, so results do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

void check_trials(std::size_t trials) {
  if (trials == 0) throw ModelError("trials must be at least 1");
}

void check_odometer(const ModelParams& params, const Counts& M) {
  if (M.size() != params.num_villages()) {
    throw ModelError("odometer length " + std::to_string(M.size()) + " does not match " +
                     std::to_string(params.num_villages()) + " villages");
  }
}

Vector scaled(const Counts& counts, std::uint32_t n) {
  Vector out(counts.size());
  for (std::size_t x = 0; x < counts.size(); ++x) {
    out[x] = static_cast<double>(counts[x]) / static_cast<double>(n);
  }
  return out;
}

double sup_distance(const Vector& a, const Vector& b) {
  double acc = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) acc = std::max(acc, std::abs(a[x] - b[x]));
  return acc;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

// ---------------------------------------------------------------- LLN sweep

LLNReport run_lln(const LLNConfig& config, std::size_t threads) {
  if (config.n_values.empty()) throw ModelError("lln: n_values must not be empty");
  if (config.seeds.empty()) throw ModelError("lln: seeds must not be empty");
  for (std::uint32_t n : config.n_values) {
    if (n == 0) throw ModelError("lln: n values must be positive");
  }
  const ModelParams params = validate_model(config.params, true);

  LLNReport report;
  report.spectral = compute_spectral(params);
  report.limit = solve_fixed_point(params, report.spectral, config.tol);

  const std::size_t v = params.num_villages();
  const std::size_t runs = config.n_values.size() * config.seeds.size();
  std::vector<std::vector<LLNRow>> per_run(runs);

  parallel_for(runs, threads, [&](std::size_t k) {
    const std::uint32_t n = config.n_values[k / config.seeds.size()];
    const std::uint64_t seed = config.seeds[k % config.seeds.size()];
    StackSource src(params, n, seed);
    const SimResult sim = stabilize(params, n, src, config.policy);
    const SingleLoopResult loop = single_loop(params, n, src, sim.M_star);
    if (loop.Phi != sim.M_star || loop.S != sim.S_star) {
      throw InvariantViolation(fmt::format(
          "discrete fixed point failed for n = {}, seed = {}", n, seed));
    }

    const Vector m_n = scaled(sim.M_star, n);
    const Vector s_n = scaled(sim.S_star, n);
    Vector diff(v);
    for (std::size_t x = 0; x < v; ++x) diff[x] = m_n[x] - report.limit.m_star[x];
    const double err_m_inf = sup_norm(diff);
    const double err_s_inf = sup_distance(s_n, report.limit.s_star);
    const double err_m_eta = eta_norm(report.spectral, diff);

    auto& rows = per_run[k];
    for (std::size_t x = 0; x < v; ++x) {
      rows.push_back(LLNRow{n, seed, static_cast<Village>(x), m_n[x], s_n[x],
                            report.limit.m_star[x], report.limit.s_star[x], err_m_inf,
                            err_s_inf, err_m_eta});
    }
  });

  for (auto& rows : per_run) {
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  report.summary = summarize_lln(report.rows);
  return report;
}

std::vector<SummaryRow> summarize_lln(std::span<const LLNRow> rows) {
  // One entry per run; villages of the same run repeat the run's errors.
  std::map<std::uint32_t, std::map<std::uint64_t, const LLNRow*>> runs;
  for (const LLNRow& r : rows) runs[r.n].emplace(r.seed, &r);

  std::vector<SummaryRow> out;
  static constexpr const char* kMetrics[] = {"err_m_inf", "err_s_inf", "err_m_eta"};
  for (const auto& [n, by_seed] : runs) {
    for (int metric = 0; metric < 3; ++metric) {
      std::vector<double> values;
      values.reserve(by_seed.size());
      for (const auto& [seed, row] : by_seed) {
        values.push_back(metric == 0   ? row->err_m_inf
                         : metric == 1 ? row->err_s_inf
                                       : row->err_m_eta);
      }
      std::sort(values.begin(), values.end());
      out.push_back(SummaryRow{n, kMetrics[metric], quantile_sorted(values, 0.5),
                               quantile_sorted(values, 0.9), values.size()});
    }
  }
  return out;
}

void write_lln_csv(std::ostream& out, std::span<const LLNRow> rows) {
  out << "experiment,n,seed,village,m_n,s_n,m_limit,s_limit,err_m_inf,err_s_inf,err_m_eta\n";
  for (const LLNRow& r : rows) {
    out << "lln," << r.n << ',' << r.seed << ',' << r.village << ',' << num(r.m_n) << ','
        << num(r.s_n) << ',' << num(r.m_limit) << ',' << num(r.s_limit) << ','
        << num(r.err_m_inf) << ',' << num(r.err_s_inf) << ',' << num(r.err_m_eta) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> summary) {
  out << "n,metric,median,p90,runs\n";
  for (const SummaryRow& r : summary) {
    out << r.n << ',' << r.metric << ',' << num(r.median) << ',' << num(r.p90) << ',' << r.runs
        << '\n';
  }
}

// ------------------------------------------------------------ concentration

double sleeper_deviation_bound(const ModelParams& params, std::uint32_t n, const Counts& M,
                               double a) {
  double mass = 0.0;
  for (std::int64_t m : M) mass += static_cast<double>(m);
  const double v = static_cast<double>(params.num_villages());
  const double excess = std::max(a * n - 2.0, 0.0);
  if (mass == 0.0) return excess > 0.0 ? 0.0 : 2.0 * v;
  return 2.0 * v * std::exp(-2.0 * excess * excess / mass);
}

double odometer_deviation_bound(const ModelParams& params, std::uint32_t n, const Counts& M,
                                double a) {
  double mass = 0.0;
  for (std::int64_t m : M) mass += static_cast<double>(m);
  const double nu = l1_norm(params.init_actives);
  const double dn = static_cast<double>(n);
  const double v = static_cast<double>(params.num_villages());
  const double excess = std::max(a * dn - nu - mass / dn - 2.0, 0.0);
  const double spread = 81.0 * (dn + nu * dn + a * dn + mass);
  return 4.0 * v * std::exp(-2.0 * excess * excess / spread);
}

ConcentrationReport run_concentration(const ConcentrationConfig& config, std::size_t threads) {
  check_trials(config.trials);
  if (!(config.a > 0.0)) throw ModelError("concentration: a must be positive");
  if (config.n == 0) throw ModelError("concentration: n must be positive");
  const ModelParams params = validate_model(config.params, true);
  check_odometer(params, config.M);
  for (std::int64_t m : config.M) {
    if (m < 0) throw ModelError("concentration: odometer entries must be nonnegative");
  }

  const Vector m = scaled(config.M, config.n);
  const Vector phi_limit = phi(params, m);
  const Vector s_limit = sleep_profile(params, m);

  std::vector<std::uint8_t> sleeper_hit(config.trials, 0);
  std::vector<std::uint8_t> odometer_hit(config.trials, 0);
  parallel_for(config.trials, threads, [&](std::size_t t) {
    StackSource src(params, config.n, trial_seed(config.seed, t));
    const SingleLoopResult loop = single_loop(params, config.n, src, config.M);
    sleeper_hit[t] = sup_distance(scaled(loop.S, config.n), s_limit) >= config.a;
    odometer_hit[t] = sup_distance(scaled(loop.Phi, config.n), phi_limit) >= config.a;
  });

  ConcentrationReport r;
  r.n = config.n;
  r.a = config.a;
  r.trials = config.trials;
  r.sleeper_exceed = static_cast<std::size_t>(std::count(sleeper_hit.begin(), sleeper_hit.end(), 1));
  r.odometer_exceed =
      static_cast<std::size_t>(std::count(odometer_hit.begin(), odometer_hit.end(), 1));
  const double trials = static_cast<double>(config.trials);
  r.sleeper_frequency = static_cast<double>(r.sleeper_exceed) / trials;
  r.odometer_frequency = static_cast<double>(r.odometer_exceed) / trials;
  r.sleeper_bound = sleeper_deviation_bound(params, config.n, config.M, config.a);
  r.odometer_bound = odometer_deviation_bound(params, config.n, config.M, config.a);
  auto slack = [trials](double bound) {
    const double p = std::min(bound, 1.0);
    return 3.0 * std::sqrt(p * (1.0 - p) / trials);
  };
  r.sleeper_slack = slack(r.sleeper_bound);
  r.odometer_slack = slack(r.odometer_bound);
  r.sleeper_violation = r.sleeper_frequency > r.sleeper_bound + r.sleeper_slack;
  r.odometer_violation = r.odometer_frequency > r.odometer_bound + r.odometer_slack;
  return r;
}

void write_report(std::ostream& out, const ConcentrationReport& r) {
  out << "experiment: concentration\n"
      << "n: " << r.n << '\n'
      << "a: " << num(r.a) << '\n'
      << "trials: " << r.trials << '\n'
      << "sleeper_exceed: " << r.sleeper_exceed << '\n'
      << "sleeper_frequency: " << num(r.sleeper_frequency) << '\n'
      << "sleeper_bound: " << num(r.sleeper_bound) << '\n'
      << "sleeper_slack: " << num(r.sleeper_slack) << '\n'
      << "sleeper_violation: " << (r.sleeper_violation ? "true" : "false") << '\n'
      << "odometer_exceed: " << r.odometer_exceed << '\n'
      << "odometer_frequency: " << num(r.odometer_frequency) << '\n'
      << "odometer_bound: " << num(r.odometer_bound) << '\n'
      << "odometer_slack: " << num(r.odometer_slack) << '\n'
      << "odometer_violation: " << (r.odometer_violation ? "true" : "false") << '\n';
}

// ------------------------------------------------------ last-notice kappa test

double KappaReport::min_p_value() const {
  double p = 1.0;
  for (const auto& v : villages) p = std::min(p, v.p_value);
  return p;
}

KappaReport run_kappa_equivalence(const KappaConfig& config, std::size_t threads) {
  check_trials(config.trials);
  if (config.n == 0) throw ModelError("kappa: n must be positive");
  const ModelParams params = validate_model(config.params, false);
  check_odometer(params, config.M);

  const std::size_t v = params.num_villages();
  std::vector<Counts> plain(config.trials);
  std::vector<Counts> tilde(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t t) {
    StackSource src(params, config.n, trial_seed(config.seed, t, 0));
    plain[t] = single_loop(params, config.n, src, config.M).Phi;
    const std::uint64_t aux = trial_seed(config.seed, t, 2);
    if (config.shared_sources) {
      tilde[t] = single_loop_tilde(params, config.n, src, config.M, aux);
    } else {
      StackSource other(params, config.n, trial_seed(config.seed, t, 1));
      tilde[t] = single_loop_tilde(params, config.n, other, config.M, aux);
    }
  });

  KappaReport report;
  report.trials = config.trials;
  for (std::size_t x = 0; x < v; ++x) {
    std::vector<std::int64_t> a(config.trials);
    std::vector<std::int64_t> b(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
      a[t] = plain[t][x];
      b[t] = tilde[t][x];
    }
    report.villages.push_back(two_sample_chi_square(a, b));
  }
  return report;
}

void write_report(std::ostream& out, const KappaReport& r) {
  out << "experiment: kappa-test\n"
      << "trials: " << r.trials << '\n';
  for (std::size_t x = 0; x < r.villages.size(); ++x) {
    const auto& c = r.villages[x];
    out << "village_" << x << "_statistic: " << num(c.statistic) << '\n'
        << "village_" << x << "_dof: " << c.dof << '\n'
        << "village_" << x << "_bins: " << c.bins << '\n'
        << "village_" << x << "_p_value: " << num(c.p_value) << '\n';
  }
  out << "min_p_value: " << num(r.min_p_value()) << '\n';
}

// ------------------------------------------ conditional mean of the outflux

double expected_outflux_given_inflow(const ModelParams& params, Village x, std::uint32_t n,
                                     std::int64_t u) {
  const double dn = static_cast<double>(n);
  const double density = static_cast<double>(floor_count(params.init_sleepers.at(x), n)) / dn;
  // 1 - (1 - 1/n)^u
  const double reached =
      u == 0 ? 0.0 : -std::expm1(static_cast<double>(u) * std::log1p(-1.0 / dn));
  return dn * (density - critical_density(params.sleep_rates.at(x))) * reached +
         static_cast<double>(u);
}

bool ConditionalMeanReport::all_within() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.within_3se; });
}

ConditionalMeanReport run_conditional_mean(const ConditionalMeanConfig& config,
                                           std::size_t threads) {
  check_trials(config.trials);
  if (config.n == 0) throw ModelError("conditional mean: n must be positive");
  const ModelParams params = validate_model(config.params, false);
  check_odometer(params, config.M);
  if (config.village >= params.num_villages()) throw ModelError("village out of range");

  std::vector<std::int64_t> inflow(config.trials);
  std::vector<std::int64_t> outflux(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t t) {
    StackSource src(params, config.n, trial_seed(config.seed, t));
    const SingleLoopResult loop = single_loop(params, config.n, src, config.M);
    inflow[t] = loop.I[config.village];
    outflux[t] = loop.Phi[config.village];
  });

  std::map<std::int64_t, std::vector<double>> groups;
  for (std::size_t t = 0; t < config.trials; ++t) {
    groups[inflow[t]].push_back(static_cast<double>(outflux[t]));
  }

  ConditionalMeanReport report;
  for (const auto& [u, values] : groups) {
    if (values.size() < config.min_samples || values.size() < 2) continue;
    const double count = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= count;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    ConditionalMeanRow row;
    row.u = u;
    row.samples = values.size();
    row.mean = mean;
    row.std_error = std::sqrt(ss / (count - 1.0) / count);
    row.expected = expected_outflux_given_inflow(params, config.village, config.n, u);
    row.within_3se = std::abs(row.mean - row.expected) <= 3.0 * row.std_error + 1e-9;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace varw
