#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "varw/model.hpp"

namespace varw {

using Village = std::uint32_t;
/// Houses are numbered 1..n inside each village.
using House = std::uint32_t;

inline constexpr Village kGraveyard = std::numeric_limits<Village>::max();

enum class Notice : std::uint8_t { Sleep = 0, Jump = 1 };

/// Explicit instruction prefixes for hand-traced fixtures.
struct InjectedStacks {
  std::map<Village, std::vector<Village>> airplane;  // kGraveyard allowed
  std::map<Village, std::vector<House>> taxi;
  std::map<std::pair<Village, House>, std::vector<Notice>> landlord;
};

/// The three instruction-stack families of one realization.
///
/// Every stack is an independent counter-based stream keyed by
/// (master_seed, kind, village, house), so the value at a given index does
/// not depend on the order in which stacks are queried. Realized prefixes
/// are memoized; landlord stacks are created only for houses that are
/// actually touched.
///
/// Not thread-safe: one source belongs to one run.
class StackSource {
 public:
  StackSource(const ModelParams& params, std::uint32_t n, std::uint64_t master_seed);

  /// A source serving `stacks`. In strict mode any query past an injected
  /// prefix (or of a stack that was never injected) throws StackExhausted;
  /// otherwise the seeded streams continue after the prefix.
  static StackSource inject(const ModelParams& params, std::uint32_t n, InjectedStacks stacks,
                            bool strict = true, std::uint64_t master_seed = 0);

  /// zeta_{j,x}: destination village of the j-th jump out of x, or kGraveyard.
  Village airplane(Village x, std::uint64_t j);
  /// gamma_{j,x}: house in 1..n taken by the j-th arrival at x.
  House taxi(Village x, std::uint64_t j);
  /// kappa_{j,(x,i)}
  Notice landlord(Village x, House i, std::uint64_t j);

  std::uint32_t houses() const noexcept { return n_; }
  std::size_t num_villages() const noexcept { return airplane_cdf_.size(); }
  std::uint64_t master_seed() const noexcept { return seed_; }
  bool strict() const noexcept { return strict_; }

  /// Highest index served so far on each stack (0 when untouched).
  std::uint64_t airplane_served(Village x) const { return airplane_served_.at(x); }
  std::uint64_t taxi_served(Village x) const { return taxi_served_.at(x); }
  std::uint64_t landlord_served(Village x, House i) const;
  std::size_t touched_houses() const noexcept { return landlord_.size(); }

 private:
  struct LandlordStack {
    std::vector<Notice> values;
    std::uint64_t served = 0;
  };

  std::uint64_t house_key(Village x, House i) const;
  void check_village(Village x) const;

  Village sample_airplane(Village x, std::uint64_t j) const;
  House sample_taxi(Village x, std::uint64_t j) const;
  Notice sample_landlord(Village x, House i, std::uint64_t j) const;

  std::uint32_t n_;
  std::uint64_t seed_;
  bool strict_ = false;
  std::vector<std::vector<double>> airplane_cdf_;
  std::vector<double> sleep_prob_;

  std::vector<std::vector<Village>> airplane_;
  std::vector<std::vector<House>> taxi_;
  std::unordered_map<std::uint64_t, LandlordStack> landlord_;
  std::vector<std::uint64_t> airplane_served_;
  std::vector<std::uint64_t> taxi_served_;
};

}  // namespace varw
