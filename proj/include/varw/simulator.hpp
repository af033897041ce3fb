#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "varw/model.hpp"
#include "varw/stacks.hpp"

namespace varw {

using Counts = std::vector<std::int64_t>;

/// floor(density * n), the number of initial sleepers / immigrants.
std::int64_t floor_count(double density, std::uint32_t n);

/// House occupancy of all villages; house (x, i) lives at x * n + (i - 1).
class DiscreteConfig {
 public:
  DiscreteConfig(std::size_t num_villages, std::uint32_t n)
      : n_(n), villages_(num_villages), count_(num_villages * n, 0), sleeping_(num_villages * n, 0) {}

  std::uint32_t houses() const noexcept { return n_; }
  std::size_t num_villages() const noexcept { return villages_; }

  std::uint32_t count(Village x, House i) const { return count_[slot(x, i)]; }
  bool sleeping(Village x, House i) const { return sleeping_[slot(x, i)] != 0; }

  bool active(std::size_t slot) const {
    return count_[slot] >= 2 || (count_[slot] == 1 && !sleeping_[slot]);
  }
  bool stable() const;
  std::int64_t sleepers(Village x) const;

  /// An active particle lands in the house, waking any sleeper.
  void arrive(std::size_t slot) {
    ++count_[slot];
    sleeping_[slot] = 0;
  }
  void place_sleeper(std::size_t slot) {
    count_[slot] = 1;
    sleeping_[slot] = 1;
  }
  void fall_asleep(std::size_t slot) { sleeping_[slot] = 1; }
  void depart(std::size_t slot) { --count_[slot]; }
  std::uint32_t count_at(std::size_t slot) const { return count_[slot]; }

  std::size_t slot(Village x, House i) const {
    return static_cast<std::size_t>(x) * n_ + (i - 1);
  }
  Village village_of(std::size_t slot) const { return static_cast<Village>(slot / n_); }
  House house_of(std::size_t slot) const { return static_cast<House>(slot % n_ + 1); }

 private:
  std::uint32_t n_;
  std::size_t villages_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint8_t> sleeping_;
};

enum class OrderPolicy { FifoHouseQueue, VillageRoundRobin, LowestIndexFirst };

std::optional<OrderPolicy> parse_order_policy(std::string_view name);
std::string_view to_string(OrderPolicy policy);

/// Instructions consumed per village.
struct Consumption {
  Counts airplane;
  Counts taxi;
  Counts landlord;
};

struct SimResult {
  Counts M_star;  // JUMP notices executed per village
  Counts S_star;  // sleepers per village in the final configuration
  Counts inflow;  // arrivals at each village's airport, immigrants included
  Consumption consumed;
  DiscreteConfig final_config;
  std::uint64_t steps = 0;
};

struct SingleLoopResult {
  Counts Phi;
  Counts S;
  Counts I;  // airport arrivals
  Counts A;  // houses reached by at least one arrival
  Counts Q;  // initial sleepers never reached
  Counts J;  // reached houses that end empty
};

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000;

/// Sleepers in houses 1..floor(sigma_x n), then floor(nu_x n) immigrants
/// routed by the first taxi tickets of each village.
DiscreteConfig init_config(const ModelParams& params, std::uint32_t n, StackSource& src);

/// Topples active houses until the configuration is stable. Every run
/// checks mass balance and stability of the result (InvariantViolation);
/// more than `step_cap` landlord notices raises GuardError.
SimResult stabilize(const ModelParams& params, std::uint32_t n, StackSource& src,
                    OrderPolicy policy = OrderPolicy::FifoHouseQueue,
                    std::uint64_t step_cap = kDefaultStepCap);

/// Routes the arrivals implied by odometer M through the stacks once.
SingleLoopResult single_loop(const ModelParams& params, std::uint32_t n, StackSource& src,
                             const Counts& M);

/// single_loop with the final landlord notice of each reached house replaced
/// by a fresh Bernoulli(1/(1+lambda_x)) variable drawn from `aux_seed`.
Counts single_loop_tilde(const ModelParams& params, std::uint32_t n, StackSource& src,
                         const Counts& M, std::uint64_t aux_seed);

}  // namespace varw
