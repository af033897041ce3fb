#include "varw/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "varw/errors.hpp"

namespace varw {

Kernel::Kernel(std::size_t size, std::vector<double> row_major)
    : size_(size), data_(std::move(row_major)) {
  if (data_.size() != size_ * size_) {
    throw ModelError("kernel: expected " + std::to_string(size_ * size_) + " entries, got " +
                     std::to_string(data_.size()));
  }
}

Kernel Kernel::from_rows(const std::vector<std::vector<double>>& rows) {
  Kernel k(rows.size());
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != rows.size()) {
      throw ModelError("kernel: row " + std::to_string(x) + " has " +
                       std::to_string(rows[x].size()) + " entries, expected " +
                       std::to_string(rows.size()));
    }
    std::copy(rows[x].begin(), rows[x].end(), k.data_.begin() + x * k.size_);
  }
  return k;
}

double Kernel::row_sum(std::size_t x) const {
  const auto r = row(x);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

Vector critical_profile(const ModelParams& params) {
  Vector out(params.num_villages());
  std::transform(params.sleep_rates.begin(), params.sleep_rates.end(), out.begin(),
                 critical_density);
  return out;
}

bool is_subcritical(const ModelParams& params) {
  for (std::size_t x = 0; x < params.num_villages(); ++x) {
    if (params.init_sleepers[x] > critical_density(params.sleep_rates[x]) + kSubcriticalTolerance) {
      return false;
    }
  }
  return true;
}

bool is_irreducible(const Kernel& kernel) {
  const std::size_t n = kernel.size();
  std::vector<char> reach(n * n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    reach[x * n + x] = 1;
    for (std::size_t y = 0; y < n; ++y) {
      if (kernel(x, y) > 0.0) reach[x * n + y] = 1;
    }
  }
  // Warshall closure.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t x = 0; x < n; ++x) {
      if (!reach[x * n + k]) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (reach[k * n + y]) reach[x * n + y] = 1;
      }
    }
  }
  return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

namespace {

void check_length(const Vector& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << name << ": length " << v.size() << " does not match " << n << " villages";
    throw ModelError(msg.str());
  }
}

void check_finite(const Vector& v, const char* name) {
  for (std::size_t x = 0; x < v.size(); ++x) {
    if (!std::isfinite(v[x])) {
      throw ModelError(std::string(name) + "[" + std::to_string(x) + "] is not finite");
    }
  }
}

}  // namespace

ModelParams validate_model(const ModelParams& params, bool require_subcritical) {
  const std::size_t n = params.num_villages();
  if (n == 0) throw ModelError("model has no villages");
  check_length(params.sleep_rates, n, "lambda");
  check_length(params.init_sleepers, n, "sigma");
  check_length(params.init_actives, n, "nu");
  if (!params.labels.empty()) {
    if (params.labels.size() != n) {
      throw ModelError("labels: length " + std::to_string(params.labels.size()) +
                       " does not match " + std::to_string(n) + " villages");
    }
  }
  check_finite(params.sleep_rates, "lambda");
  check_finite(params.init_sleepers, "sigma");
  check_finite(params.init_actives, "nu");

  bool has_deficient_row = false;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double p = params.kernel(x, y);
      if (!std::isfinite(p) || p < 0.0) {
        throw ModelError("kernel[" + std::to_string(x) + "][" + std::to_string(y) +
                         "] must be a finite nonnegative number");
      }
    }
    const double s = params.kernel.row_sum(x);
    if (s > 1.0 + kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "kernel row " << x << " sums to " << s << " > 1";
      throw ModelError(msg.str());
    }
    if (s < 1.0 - kRowSumTolerance) has_deficient_row = true;
  }
  if (!has_deficient_row) {
    throw ModelError("kernel is not strictly sub-stochastic: every row sums to 1");
  }
  if (!is_irreducible(params.kernel)) {
    throw ModelError("kernel is reducible: some village cannot reach another");
  }

  for (std::size_t x = 0; x < n; ++x) {
    if (params.sleep_rates[x] < 0.0) {
      throw ModelError("lambda[" + std::to_string(x) + "] is negative");
    }
    if (params.init_actives[x] < 0.0) {
      throw ModelError("nu[" + std::to_string(x) + "] is negative");
    }
    if (params.init_sleepers[x] < 0.0 || params.init_sleepers[x] > 1.0) {
      throw ModelError("sigma[" + std::to_string(x) + "] is outside [0, 1]");
    }
  }
  if (require_subcritical) {
    for (std::size_t x = 0; x < n; ++x) {
      const double c = critical_density(params.sleep_rates[x]);
      if (params.init_sleepers[x] > c + kSubcriticalTolerance) {
        std::ostringstream msg;
        msg << "not subcritical: sigma[" << x << "] = " << params.init_sleepers[x]
            << " exceeds lambda/(1+lambda) = " << c;
        throw ModelError(msg.str());
      }
    }
  }
  return params;
}

SpectralData compute_spectral(const ModelParams& params) {
  const Kernel& p = params.kernel;
  const std::size_t n = p.size();
  if (n == 0) throw ModelError("model has no villages");

  Vector v(n, 1.0);
  Vector w(n);
  std::size_t iter = 0;
  bool converged = false;
  while (iter < kEigenIterationCap) {
    ++iter;
    for (std::size_t x = 0; x < n; ++x) {
      const auto r = p.row(x);
      w[x] = v[x] + std::inner_product(r.begin(), r.end(), v.begin(), 0.0);
    }
    const double scale = *std::max_element(w.begin(), w.end());
    if (!(scale > 0.0)) throw GuardError("power iteration collapsed to zero");
    double step = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      w[x] /= scale;
      step = std::max(step, std::abs(w[x] - v[x]));
    }
    v.swap(w);
    if (step <= kEigenStepTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw GuardError("power iteration did not converge within " +
                     std::to_string(kEigenIterationCap) + " iterations");
  }

  SpectralData out;
  out.iterations = iter;
  const auto top = std::max_element(v.begin(), v.end());
  const double vmax = *top;
  for (double& e : v) e /= vmax;
  const std::size_t xmax = static_cast<std::size_t>(top - v.begin());
  v[xmax] = 1.0;
  out.eta = std::move(v);

  const auto top_row = p.row(xmax);
  out.mu = std::inner_product(top_row.begin(), top_row.end(), out.eta.begin(), 0.0);
  out.eta_min = *std::min_element(out.eta.begin(), out.eta.end());

  double residual = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const auto r = p.row(x);
    const double pe = std::inner_product(r.begin(), r.end(), out.eta.begin(), 0.0);
    residual = std::max(residual, std::abs(pe - out.mu * out.eta[x]));
  }
  if (residual > kEigenResidualTolerance) {
    throw GuardError("power iteration residual " + std::to_string(residual) +
                     " exceeds tolerance");
  }
  if (out.mu < -kEigenResidualTolerance || out.mu >= 1.0) {
    throw GuardError("principal eigenvalue " + std::to_string(out.mu) + " is outside [0, 1)");
  }
  if (!(out.eta_min > 0.0)) throw GuardError("principal eigenvector has a zero entry");
  out.mu = std::max(out.mu, 0.0);
  return out;
}

double eta_norm(const SpectralData& spectral, std::span<const double> w) {
  if (w.size() != spectral.eta.size()) {
    throw ModelError("eta_norm: vector length " + std::to_string(w.size()) +
                     " does not match " + std::to_string(spectral.eta.size()) + " villages");
  }
  double acc = 0.0;
  for (std::size_t x = 0; x < w.size(); ++x) acc += std::abs(w[x]) * spectral.eta[x];
  return acc;
}

Vector left_multiply(const Kernel& kernel, std::span<const double> m) {
  const std::size_t n = kernel.size();
  if (m.size() != n) {
    throw ModelError("vector length " + std::to_string(m.size()) + " does not match " +
                     std::to_string(n) + " villages");
  }
  Vector out(n, 0.0);
  for (std::size_t y = 0; y < n; ++y) {
    if (m[y] == 0.0) continue;
    const auto r = kernel.row(y);
    for (std::size_t x = 0; x < n; ++x) out[x] += m[y] * r[x];
  }
  return out;
}

double sup_norm(std::span<const double> w) {
  double acc = 0.0;
  for (double v : w) acc = std::max(acc, std::abs(v));
  return acc;
}

double l1_norm(std::span<const double> w) {
  double acc = 0.0;
  for (double v : w) acc += std::abs(v);
  return acc;
}

}  // namespace varw
