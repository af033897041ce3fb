#include "varw/stacks.hpp"

#include <stdexcept>
#include <string>

#include "varw/errors.hpp"
#include "varw/random.hpp"

namespace varw {

namespace {

enum StackTag : std::uint64_t { kAirplaneTag = 1, kTaxiTag = 2, kLandlordTag = 3 };

void check_index(std::uint64_t j) {
  if (j == 0) throw std::out_of_range("stack indices start at 1");
}

[[noreturn]] void exhausted(const std::string& what, std::uint64_t j) {
  throw StackExhausted(what + ": index " + std::to_string(j) + " is past the injected prefix");
}

}  // namespace

StackSource::StackSource(const ModelParams& params, std::uint32_t n, std::uint64_t master_seed)
    : n_(n), seed_(master_seed) {
  if (n == 0) throw ModelError("number of houses must be positive");
  const std::size_t v = params.num_villages();
  airplane_cdf_.resize(v);
  sleep_prob_.resize(v);
  for (std::size_t x = 0; x < v; ++x) {
    double acc = 0.0;
    for (double p : params.kernel.row(x)) {
      acc += p;
      airplane_cdf_[x].push_back(acc);
    }
    sleep_prob_[x] = critical_density(params.sleep_rates.at(x));
  }
  airplane_.resize(v);
  taxi_.resize(v);
  airplane_served_.assign(v, 0);
  taxi_served_.assign(v, 0);
}

StackSource StackSource::inject(const ModelParams& params, std::uint32_t n,
                                InjectedStacks stacks, bool strict, std::uint64_t master_seed) {
  StackSource src(params, n, master_seed);
  src.strict_ = strict;
  for (auto& [x, values] : stacks.airplane) {
    src.check_village(x);
    for (Village y : values) {
      if (y != kGraveyard && y >= src.num_villages()) {
        throw ModelError("injected airplane ticket names an unknown village");
      }
    }
    src.airplane_[x] = std::move(values);
  }
  for (auto& [x, values] : stacks.taxi) {
    src.check_village(x);
    for (House h : values) {
      if (h < 1 || h > n) throw ModelError("injected taxi ticket is outside 1..n");
    }
    src.taxi_[x] = std::move(values);
  }
  for (auto& [house, values] : stacks.landlord) {
    src.landlord_[src.house_key(house.first, house.second)].values = std::move(values);
  }
  return src;
}

void StackSource::check_village(Village x) const {
  if (x >= num_villages()) {
    throw std::out_of_range("village " + std::to_string(x) + " out of range");
  }
}

std::uint64_t StackSource::house_key(Village x, House i) const {
  check_village(x);
  if (i < 1 || i > n_) throw std::out_of_range("house " + std::to_string(i) + " out of range");
  return static_cast<std::uint64_t>(x) * n_ + (i - 1);
}

Village StackSource::sample_airplane(Village x, std::uint64_t j) const {
  const double u = to_unit(stream_word(stream_key(seed_, kAirplaneTag, x, 0), j));
  const auto& cdf = airplane_cdf_[x];
  for (std::size_t y = 0; y < cdf.size(); ++y) {
    if (u < cdf[y]) return static_cast<Village>(y);
  }
  return kGraveyard;
}

House StackSource::sample_taxi(Village x, std::uint64_t j) const {
  const std::uint64_t w = stream_word(stream_key(seed_, kTaxiTag, x, 0), j);
  return static_cast<House>(1 + to_below(w, n_));
}

Notice StackSource::sample_landlord(Village x, House i, std::uint64_t j) const {
  const double u = to_unit(stream_word(stream_key(seed_, kLandlordTag, x, i), j));
  return u < sleep_prob_[x] ? Notice::Sleep : Notice::Jump;
}

Village StackSource::airplane(Village x, std::uint64_t j) {
  check_village(x);
  check_index(j);
  auto& stack = airplane_[x];
  if (j > stack.size()) {
    if (strict_) exhausted("airplane stack of village " + std::to_string(x), j);
    for (std::uint64_t k = stack.size() + 1; k <= j; ++k) stack.push_back(sample_airplane(x, k));
  }
  airplane_served_[x] = std::max(airplane_served_[x], j);
  return stack[j - 1];
}

House StackSource::taxi(Village x, std::uint64_t j) {
  check_village(x);
  check_index(j);
  auto& stack = taxi_[x];
  if (j > stack.size()) {
    if (strict_) exhausted("taxi stack of village " + std::to_string(x), j);
    for (std::uint64_t k = stack.size() + 1; k <= j; ++k) stack.push_back(sample_taxi(x, k));
  }
  taxi_served_[x] = std::max(taxi_served_[x], j);
  return stack[j - 1];
}

Notice StackSource::landlord(Village x, House i, std::uint64_t j) {
  const std::uint64_t key = house_key(x, i);
  check_index(j);
  auto& stack = landlord_[key];
  if (j > stack.values.size()) {
    if (strict_) {
      exhausted("landlord stack of house (" + std::to_string(x) + "," + std::to_string(i) + ")",
                j);
    }
    for (std::uint64_t k = stack.values.size() + 1; k <= j; ++k) {
      stack.values.push_back(sample_landlord(x, i, k));
    }
  }
  stack.served = std::max(stack.served, j);
  return stack.values[j - 1];
}

std::uint64_t StackSource::landlord_served(Village x, House i) const {
  const auto it = landlord_.find(house_key(x, i));
  return it == landlord_.end() ? 0 : it->second.served;
}

}  // namespace varw
