#include "varw/simulator.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <queue>
#include <sstream>
#include <string>

#include "varw/errors.hpp"
#include "varw/random.hpp"

namespace varw {

std::int64_t floor_count(double density, std::uint32_t n) {
  return static_cast<std::int64_t>(std::floor(density * static_cast<double>(n)));
}

bool DiscreteConfig::stable() const {
  for (std::size_t s = 0; s < count_.size(); ++s) {
    if (count_[s] > 1) return false;
    if (count_[s] == 1 && !sleeping_[s]) return false;
  }
  return true;
}

std::int64_t DiscreteConfig::sleepers(Village x) const {
  std::int64_t total = 0;
  const std::size_t begin = static_cast<std::size_t>(x) * n_;
  for (std::size_t s = begin; s < begin + n_; ++s) {
    total += (count_[s] == 1 && sleeping_[s]) ? 1 : 0;
  }
  return total;
}

std::optional<OrderPolicy> parse_order_policy(std::string_view name) {
  if (name == "fifo-house-queue") return OrderPolicy::FifoHouseQueue;
  if (name == "village-round-robin") return OrderPolicy::VillageRoundRobin;
  if (name == "lowest-index-first") return OrderPolicy::LowestIndexFirst;
  return std::nullopt;
}

std::string_view to_string(OrderPolicy policy) {
  switch (policy) {
    case OrderPolicy::FifoHouseQueue: return "fifo-house-queue";
    case OrderPolicy::VillageRoundRobin: return "village-round-robin";
    case OrderPolicy::LowestIndexFirst: return "lowest-index-first";
  }
  return "unknown";
}

namespace {

void check_dimensions(const ModelParams& params, std::uint32_t n) {
  if (n == 0) throw ModelError("number of houses must be positive");
  if (params.sleep_rates.size() != params.num_villages() ||
      params.init_sleepers.size() != params.num_villages() ||
      params.init_actives.size() != params.num_villages()) {
    throw ModelError("model vectors do not match the kernel dimension");
  }
}

// Schedulers hand out houses that may be active; callers re-check activity.
// Each house is queued at most once at a time.

class FifoScheduler {
 public:
  FifoScheduler(const DiscreteConfig& cfg) : queued_(cfg.num_villages() * cfg.houses(), 0) {}
  void activate(std::size_t s) {
    if (queued_[s]) return;
    queued_[s] = 1;
    queue_.push_back(s);
  }
  std::optional<std::size_t> pick() {
    if (queue_.empty()) return std::nullopt;
    const std::size_t s = queue_.front();
    queue_.pop_front();
    queued_[s] = 0;
    return s;
  }

 private:
  std::vector<char> queued_;
  std::deque<std::size_t> queue_;
};

class RoundRobinScheduler {
 public:
  RoundRobinScheduler(const DiscreteConfig& cfg)
      : cfg_(cfg), queued_(cfg.num_villages() * cfg.houses(), 0), queues_(cfg.num_villages()) {}
  void activate(std::size_t s) {
    if (queued_[s]) return;
    queued_[s] = 1;
    queues_[cfg_.village_of(s)].push_back(s);
  }
  std::optional<std::size_t> pick() {
    const std::size_t v = queues_.size();
    for (std::size_t k = 0; k < v; ++k) {
      auto& q = queues_[(cursor_ + k) % v];
      if (q.empty()) continue;
      const std::size_t s = q.front();
      q.pop_front();
      queued_[s] = 0;
      cursor_ = (cursor_ + k + 1) % v;
      return s;
    }
    return std::nullopt;
  }

 private:
  const DiscreteConfig& cfg_;
  std::vector<char> queued_;
  std::vector<std::deque<std::size_t>> queues_;
  std::size_t cursor_ = 0;
};

class LowestIndexScheduler {
 public:
  LowestIndexScheduler(const DiscreteConfig& cfg) : queued_(cfg.num_villages() * cfg.houses(), 0) {}
  void activate(std::size_t s) {
    if (queued_[s]) return;
    queued_[s] = 1;
    heap_.push(s);
  }
  std::optional<std::size_t> pick() {
    if (heap_.empty()) return std::nullopt;
    const std::size_t s = heap_.top();
    heap_.pop();
    queued_[s] = 0;
    return s;
  }

 private:
  std::vector<char> queued_;
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> heap_;
};

template <class Scheduler>
SimResult run_stabilization(const ModelParams& params, std::uint32_t n, StackSource& src,
                            std::uint64_t step_cap) {
  const std::size_t v = params.num_villages();
  SimResult out{Counts(v, 0), Counts(v, 0), Counts(v, 0),
                Consumption{Counts(v, 0), Counts(v, 0), Counts(v, 0)},
                init_config(params, n, src), 0};
  DiscreteConfig& cfg = out.final_config;

  std::vector<std::uint64_t> airplane_next(v, 0);
  std::vector<std::uint64_t> taxi_next(v, 0);
  std::vector<std::uint32_t> landlord_next(v * n, 0);
  for (std::size_t x = 0; x < v; ++x) {
    const std::int64_t immigrants = floor_count(params.init_actives[x], n);
    taxi_next[x] = static_cast<std::uint64_t>(immigrants);
    out.inflow[x] = immigrants;
  }

  Scheduler sched(cfg);
  for (std::size_t s = 0; s < v * n; ++s) {
    if (cfg.active(s)) sched.activate(s);
  }

  while (auto picked = sched.pick()) {
    const std::size_t s = *picked;
    if (!cfg.active(s)) continue;
    if (++out.steps > step_cap) {
      throw GuardError("stabilization exceeded the step cap of " + std::to_string(step_cap) +
                       " landlord notices");
    }
    const Village x = cfg.village_of(s);
    const House i = cfg.house_of(s);
    ++out.consumed.landlord[x];
    if (src.landlord(x, i, ++landlord_next[s]) == Notice::Sleep) {
      // A sleep notice in a crowded house is spent without effect.
      if (cfg.count_at(s) == 1) cfg.fall_asleep(s);
    } else {
      cfg.depart(s);
      ++out.M_star[x];
      ++out.consumed.airplane[x];
      const Village y = src.airplane(x, ++airplane_next[x]);
      if (y != kGraveyard) {
        const House h = src.taxi(y, ++taxi_next[y]);
        ++out.consumed.taxi[y];
        ++out.inflow[y];
        const std::size_t dest = cfg.slot(y, h);
        cfg.arrive(dest);
        sched.activate(dest);
      }
    }
    if (cfg.active(s)) sched.activate(s);
  }

  for (std::size_t x = 0; x < v; ++x) {
    out.consumed.taxi[x] += floor_count(params.init_actives[x], n);
    out.S_star[x] = cfg.sleepers(static_cast<Village>(x));
    const std::int64_t expected =
        floor_count(params.init_sleepers[x], n) + out.inflow[x] - out.M_star[x];
    if (out.S_star[x] != expected) {
      std::ostringstream msg;
      msg << "mass balance violated at village " << x << ": S* = " << out.S_star[x]
          << " but floor(sigma n) + inflow - M* = " << expected;
      throw InvariantViolation(msg.str());
    }
  }
  if (!cfg.stable()) throw InvariantViolation("stabilization ended in an unstable configuration");
  return out;
}

struct ReachedHouse {
  House house;
  std::int64_t visits;  // T: arrivals plus one if an initial sleeper was there
};

struct LoopSkeleton {
  Counts I, A, Q;
  std::vector<std::vector<ReachedHouse>> reached;
};

// Everything in the single loop that depends only on airplane and taxi stacks.
LoopSkeleton route_arrivals(const ModelParams& params, std::uint32_t n, StackSource& src,
                            const Counts& M) {
  check_dimensions(params, n);
  const std::size_t v = params.num_villages();
  if (M.size() != v) {
    throw ModelError("odometer length " + std::to_string(M.size()) + " does not match " +
                     std::to_string(v) + " villages");
  }
  for (std::size_t x = 0; x < v; ++x) {
    if (M[x] < 0) throw ModelError("odometer entries must be nonnegative");
  }

  LoopSkeleton sk{Counts(v, 0), Counts(v, 0), Counts(v, 0), {}};
  sk.reached.resize(v);
  for (std::size_t x = 0; x < v; ++x) sk.I[x] = floor_count(params.init_actives[x], n);
  for (std::size_t y = 0; y < v; ++y) {
    for (std::int64_t j = 1; j <= M[y]; ++j) {
      const Village z = src.airplane(static_cast<Village>(y), static_cast<std::uint64_t>(j));
      if (z != kGraveyard) ++sk.I[z];
    }
  }

  std::vector<std::int64_t> hits(n, 0);
  for (std::size_t x = 0; x < v; ++x) {
    const auto vx = static_cast<Village>(x);
    const std::int64_t sleepers = floor_count(params.init_sleepers[x], n);
    auto& reached = sk.reached[x];
    std::vector<House> order;
    for (std::int64_t j = 1; j <= sk.I[x]; ++j) {
      const House h = src.taxi(vx, static_cast<std::uint64_t>(j));
      if (hits[h - 1]++ == 0) order.push_back(h);
    }
    std::int64_t woken = 0;
    reached.reserve(order.size());
    for (House h : order) {
      const bool had_sleeper = static_cast<std::int64_t>(h) <= sleepers;
      woken += had_sleeper ? 1 : 0;
      reached.push_back({h, hits[h - 1] + (had_sleeper ? 1 : 0)});
      hits[h - 1] = 0;
    }
    sk.A[x] = static_cast<std::int64_t>(order.size());
    sk.Q[x] = sleepers - woken;
  }
  return sk;
}

Counts outbound(const ModelParams& params, std::uint32_t n, const LoopSkeleton& sk,
                const Counts& J) {
  Counts phi(sk.I.size());
  for (std::size_t x = 0; x < phi.size(); ++x) {
    phi[x] = floor_count(params.init_sleepers[x], n) - sk.Q[x] + sk.I[x] - sk.A[x] + J[x];
  }
  return phi;
}

}  // namespace

DiscreteConfig init_config(const ModelParams& params, std::uint32_t n, StackSource& src) {
  check_dimensions(params, n);
  const std::size_t v = params.num_villages();
  DiscreteConfig cfg(v, n);
  for (std::size_t x = 0; x < v; ++x) {
    const auto vx = static_cast<Village>(x);
    const std::int64_t sleepers = floor_count(params.init_sleepers[x], n);
    for (std::int64_t i = 1; i <= sleepers; ++i) {
      cfg.place_sleeper(cfg.slot(vx, static_cast<House>(i)));
    }
    const std::int64_t immigrants = floor_count(params.init_actives[x], n);
    for (std::int64_t j = 1; j <= immigrants; ++j) {
      cfg.arrive(cfg.slot(vx, src.taxi(vx, static_cast<std::uint64_t>(j))));
    }
  }
  return cfg;
}

SimResult stabilize(const ModelParams& params, std::uint32_t n, StackSource& src,
                    OrderPolicy policy, std::uint64_t step_cap) {
  check_dimensions(params, n);
  switch (policy) {
    case OrderPolicy::FifoHouseQueue:
      return run_stabilization<FifoScheduler>(params, n, src, step_cap);
    case OrderPolicy::VillageRoundRobin:
      return run_stabilization<RoundRobinScheduler>(params, n, src, step_cap);
    case OrderPolicy::LowestIndexFirst:
      return run_stabilization<LowestIndexScheduler>(params, n, src, step_cap);
  }
  throw ModelError("unknown order policy");
}

SingleLoopResult single_loop(const ModelParams& params, std::uint32_t n, StackSource& src,
                             const Counts& M) {
  LoopSkeleton sk = route_arrivals(params, n, src, M);
  const std::size_t v = params.num_villages();
  Counts J(v, 0);
  for (std::size_t x = 0; x < v; ++x) {
    const auto vx = static_cast<Village>(x);
    for (const ReachedHouse& r : sk.reached[x]) {
      // Skip to the notice after the (T-1)-th jump.
      std::uint64_t k = 0;
      for (std::int64_t jumps = 0; jumps < r.visits - 1;) {
        if (src.landlord(vx, r.house, ++k) == Notice::Jump) ++jumps;
      }
      if (src.landlord(vx, r.house, k + 1) == Notice::Jump) ++J[x];
    }
  }

  SingleLoopResult out;
  out.Phi = outbound(params, n, sk, J);
  out.S.resize(v);
  for (std::size_t x = 0; x < v; ++x) {
    out.S[x] = -M[x] + floor_count(params.init_sleepers[x], n) + sk.I[x];
  }
  out.I = std::move(sk.I);
  out.A = std::move(sk.A);
  out.Q = std::move(sk.Q);
  out.J = std::move(J);
  return out;
}

Counts single_loop_tilde(const ModelParams& params, std::uint32_t n, StackSource& src,
                         const Counts& M, std::uint64_t aux_seed) {
  constexpr std::uint64_t kAuxTag = 4;
  LoopSkeleton sk = route_arrivals(params, n, src, M);
  const std::size_t v = params.num_villages();
  Counts J(v, 0);
  for (std::size_t x = 0; x < v; ++x) {
    const double jump_prob = 1.0 / (1.0 + params.sleep_rates[x]);
    const std::uint64_t key = stream_key(aux_seed, kAuxTag, x, 0);
    for (const ReachedHouse& r : sk.reached[x]) {
      if (to_unit(stream_word(key, r.house)) < jump_prob) ++J[x];
    }
  }
  return outbound(params, n, sk, J);
}

}  // namespace varw
