#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace varw {

using Vector = std::vector<double>;

/// Row-major square matrix of transition weights P[x][y].
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(std::size_t size) : size_(size), data_(size * size, 0.0) {}
  Kernel(std::size_t size, std::vector<double> row_major);

  static Kernel from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t x, std::size_t y) const { return data_[x * size_ + y]; }
  double& operator()(std::size_t x, std::size_t y) { return data_[x * size_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return {data_.data() + x * size_, size_};
  }
  double row_sum(std::size_t x) const;

 private:
  std::size_t size_ = 0;
  std::vector<double> data_;
};

/// One village-model instance: kernel, sleep rates and initial densities.
struct ModelParams {
  Kernel kernel;
  Vector sleep_rates;    // lambda_x >= 0
  Vector init_sleepers;  // sigma_x in [0, 1]
  Vector init_actives;   // nu_x >= 0
  std::vector<std::string> labels;  // optional, metadata only

  std::size_t num_villages() const noexcept { return kernel.size(); }
};

/// Perron data of the kernel: P eta = mu eta, max eta = 1.
struct SpectralData {
  double mu = 0.0;
  Vector eta;
  double eta_min = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kSubcriticalTolerance = 1e-12;
inline constexpr double kEigenStepTolerance = 1e-13;
inline constexpr double kEigenResidualTolerance = 1e-10;
inline constexpr std::size_t kEigenIterationCap = 1'000'000;

/// lambda / (1 + lambda): sleep probability of a landlord notice, and the
/// critical density of a village.
inline double critical_density(double sleep_rate) { return sleep_rate / (1.0 + sleep_rate); }

Vector critical_profile(const ModelParams& params);

bool is_subcritical(const ModelParams& params);

/// Checks every structural invariant of `params` and returns them unchanged.
/// Throws ModelError naming the first violated condition.
ModelParams validate_model(const ModelParams& params, bool require_subcritical);

/// True iff every village reaches every other one along positive entries.
bool is_irreducible(const Kernel& kernel);

/// Power iteration on P + I from the all-ones vector. Throws GuardError when
/// the iteration cap is hit or the result fails its residual check.
SpectralData compute_spectral(const ModelParams& params);

/// sum_x |w_x| eta_x
double eta_norm(const SpectralData& spectral, std::span<const double> w);

/// (m P)_x = sum_y m_y P[y][x]
Vector left_multiply(const Kernel& kernel, std::span<const double> m);

double sup_norm(std::span<const double> w);
double l1_norm(std::span<const double> w);

}  // namespace varw
