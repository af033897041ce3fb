#pragma once

#include <cstddef>
#include <span>

#include "varw/model.hpp"

namespace varw {

struct LimitSolution {
  Vector m_star;  // limit jump odometer
  Vector s_star;  // limit sleeper density
  /// Certified bound on the eta-norm distance of m_star to the true fixed point.
  double certified_eta_error = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kDefaultSolverTolerance = 1e-10;
inline constexpr std::size_t kSolverIterationCap = 10'000'000;

/// beta(m)_x = nu_x + sum_y m_y P[y][x]
Vector beta(const ModelParams& params, std::span<const double> m);

/// s(m)_x = -m_x + sigma_x + beta(m)_x. Not clamped; negative away from the fixed point.
Vector sleep_profile(const ModelParams& params, std::span<const double> m);

/// phi(m)_x = (sigma_x - lambda_x/(1+lambda_x)) (1 - exp(-beta(m)_x)) + beta(m)_x
Vector phi(const ModelParams& params, std::span<const double> m);

/// Right-hand side of the last-exit equation:
/// sigma_x e^{-beta_x} + lambda_x/(1+lambda_x) (1 - e^{-beta_x}).
Vector last_exit_profile(const ModelParams& params, std::span<const double> m);

/// Banach iteration m <- phi(m) from m = 0, stopped once the eta-norm step is
/// at most tol (1 - mu). Requires subcritical params. Iterates are checked to
/// be componentwise nondecreasing.
LimitSolution solve_fixed_point(const ModelParams& params, const SpectralData& spectral,
                                double tol = kDefaultSolverTolerance);

}  // namespace varw
