#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "varw/limit.hpp"
#include "varw/model.hpp"
#include "varw/simulator.hpp"
#include "varw/stats.hpp"

namespace varw {

/// Worker count: VARW_THREADS if set to a positive integer, otherwise the
/// machine's hardware concurrency.
std::size_t default_threads();

// ---------------------------------------------------------------- LLN sweep

struct LLNConfig {
  ModelParams params;
  std::vector<std::uint32_t> n_values;
  std::vector<std::uint64_t> seeds;
  double tol = kDefaultSolverTolerance;
  OrderPolicy policy = OrderPolicy::FifoHouseQueue;
};

struct LLNRow {
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  Village village = 0;
  double m_n = 0.0;
  double s_n = 0.0;
  double m_limit = 0.0;
  double s_limit = 0.0;
  double err_m_inf = 0.0;  // per run, repeated on each village row
  double err_s_inf = 0.0;
  double err_m_eta = 0.0;
};

struct SummaryRow {
  std::uint32_t n = 0;
  std::string metric;
  double median = 0.0;
  double p90 = 0.0;
  std::size_t runs = 0;
};

struct LLNReport {
  SpectralData spectral;
  LimitSolution limit;
  std::vector<LLNRow> rows;  // ordered by (n, seed) as configured, then village
  std::vector<SummaryRow> summary;
};

/// Solves the limit once, then stabilizes every (n, seed) pair and checks the
/// discrete fixed-point identity on each run (InvariantViolation on failure).
LLNReport run_lln(const LLNConfig& config, std::size_t threads = default_threads());

/// Median and 90th percentile of each error metric per n, one value per run.
std::vector<SummaryRow> summarize_lln(std::span<const LLNRow> rows);

void write_lln_csv(std::ostream& out, std::span<const LLNRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> summary);

// ------------------------------------------------------------ concentration

struct ConcentrationConfig {
  ModelParams params;
  std::uint32_t n = 0;
  Counts M;
  double a = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
};

struct ConcentrationReport {
  std::uint32_t n = 0;
  double a = 0.0;
  std::size_t trials = 0;
  std::size_t sleeper_exceed = 0;
  std::size_t odometer_exceed = 0;
  double sleeper_frequency = 0.0;
  double odometer_frequency = 0.0;
  double sleeper_bound = 0.0;
  double odometer_bound = 0.0;
  double sleeper_slack = 0.0;  // 3 sigma binomial error at the bound
  double odometer_slack = 0.0;
  bool sleeper_violation = false;
  bool odometer_violation = false;

  bool violation() const { return sleeper_violation || odometer_violation; }
};

/// 2|V| exp(-2 (a n - 2)_+^2 / ||M||_1)
double sleeper_deviation_bound(const ModelParams& params, std::uint32_t n, const Counts& M,
                               double a);
/// 4|V| exp(-2 (a n - ||nu||_1 - ||M||_1/n - 2)_+^2 / (81 (n + ||nu||_1 n + a n + ||M||_1)))
double odometer_deviation_bound(const ModelParams& params, std::uint32_t n, const Counts& M,
                                double a);

ConcentrationReport run_concentration(const ConcentrationConfig& config,
                                      std::size_t threads = default_threads());

void write_report(std::ostream& out, const ConcentrationReport& report);

// ------------------------------------------------------ last-notice kappa test

struct KappaConfig {
  ModelParams params;
  std::uint32_t n = 0;
  Counts M;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  /// Evaluate both samples of a trial on the same airplane/taxi stacks
  /// instead of independent sources.
  bool shared_sources = false;
};

struct KappaReport {
  std::size_t trials = 0;
  std::vector<ChiSquareResult> villages;
  double min_p_value() const;
};

KappaReport run_kappa_equivalence(const KappaConfig& config,
                                  std::size_t threads = default_threads());

void write_report(std::ostream& out, const KappaReport& report);

// ------------------------------------------ conditional mean of the outflux

/// n (floor(sigma_x n)/n - lambda_x/(1+lambda_x)) (1 - (1 - 1/n)^u) + u
double expected_outflux_given_inflow(const ModelParams& params, Village x, std::uint32_t n,
                                     std::int64_t u);

struct ConditionalMeanConfig {
  ModelParams params;
  std::uint32_t n = 0;
  Counts M;
  std::size_t trials = 0;
  std::size_t min_samples = 200;
  Village village = 0;
  std::uint64_t seed = 1;
};

struct ConditionalMeanRow {
  std::int64_t u = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double expected = 0.0;
  bool within_3se = false;
};

struct ConditionalMeanReport {
  std::vector<ConditionalMeanRow> rows;  // ascending u, only u with enough samples
  bool all_within() const;
};

ConditionalMeanReport run_conditional_mean(const ConditionalMeanConfig& config,
                                           std::size_t threads = default_threads());

/// Seed of the t-th independent trial derived from a base seed.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t lane = 0);

}  // namespace varw
