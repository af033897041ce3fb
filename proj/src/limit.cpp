#include "varw/limit.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "varw/errors.hpp"

namespace varw {

namespace {

void check_input(const ModelParams& params, std::span<const double> m, const char* op) {
  if (m.size() != params.num_villages()) {
    throw ModelError(std::string(op) + ": vector length " + std::to_string(m.size()) +
                     " does not match " + std::to_string(params.num_villages()) + " villages");
  }
  for (std::size_t x = 0; x < m.size(); ++x) {
    if (!(m[x] >= 0.0)) {
      throw ModelError(std::string(op) + ": m[" + std::to_string(x) + "] must be nonnegative");
    }
  }
}

// Slack for floating-point reordering when checking that iterates never decrease.
constexpr double kMonotoneSlack = 1e-13;

}  // namespace

Vector beta(const ModelParams& params, std::span<const double> m) {
  check_input(params, m, "beta");
  Vector out = left_multiply(params.kernel, m);
  for (std::size_t x = 0; x < out.size(); ++x) out[x] += params.init_actives[x];
  return out;
}

Vector sleep_profile(const ModelParams& params, std::span<const double> m) {
  Vector out = beta(params, m);
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] += params.init_sleepers[x] - m[x];
  }
  return out;
}

Vector phi(const ModelParams& params, std::span<const double> m) {
  Vector b = beta(params, m);
  for (std::size_t x = 0; x < b.size(); ++x) {
    const double gap = params.init_sleepers[x] - critical_density(params.sleep_rates[x]);
    b[x] += gap * -std::expm1(-b[x]);
  }
  return b;
}

Vector last_exit_profile(const ModelParams& params, std::span<const double> m) {
  Vector b = beta(params, m);
  for (std::size_t x = 0; x < b.size(); ++x) {
    const double stay = std::exp(-b[x]);
    b[x] = params.init_sleepers[x] * stay +
           critical_density(params.sleep_rates[x]) * -std::expm1(-b[x]);
  }
  return b;
}

LimitSolution solve_fixed_point(const ModelParams& params, const SpectralData& spectral,
                                double tol) {
  if (!(tol > 0.0)) throw ModelError("solver tolerance must be positive");
  if (!is_subcritical(params)) {
    throw ModelError("solver requires sigma_x <= lambda_x/(1+lambda_x) for every village");
  }
  if (spectral.eta.size() != params.num_villages()) {
    throw ModelError("spectral data does not match the model dimension");
  }

  const double stop = tol * (1.0 - spectral.mu);
  Vector m(params.num_villages(), 0.0);
  Vector diff(m.size());
  for (std::size_t k = 1; k <= kSolverIterationCap; ++k) {
    Vector next = phi(params, m);
    for (std::size_t x = 0; x < m.size(); ++x) {
      if (next[x] < m[x] - kMonotoneSlack * (1.0 + m[x])) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "fixed-point iterates decreased at village " << x << " (iteration " << k
            << "): " << m[x] << " -> " << next[x];
        throw InvariantViolation(msg.str());
      }
      diff[x] = next[x] - m[x];
    }
    const double step = eta_norm(spectral, diff);
    m.swap(next);
    if (step <= stop) {
      LimitSolution out;
      // The returned iterate is one contraction step past the point whose
      // residual was measured, so the same bound still holds for it.
      out.certified_eta_error = step / (1.0 - spectral.mu);
      out.s_star = sleep_profile(params, m);
      out.m_star = std::move(m);
      out.iterations = k;
      return out;
    }
  }
  throw GuardError("fixed-point iteration hit the cap of " +
                   std::to_string(kSolverIterationCap) + " iterations");
}

}  // namespace varw
