#pragma once

#include <cstdint>
#include <numeric>

namespace ordx {

/// Consensus constants for the supply schedule. `mainnet()` is the real
/// schedule; tests may shrink the epoch to exercise halvings quickly.
struct chain_params {
  std::uint64_t initial_subsidy = 5'000'000'000;
  std::uint64_t halving_interval = 210'000;
  std::uint64_t difficulty_period = 2'016;
  std::uint64_t max_block_weight = 4'000'000;

  static constexpr chain_params mainnet() { return {}; }

  /// Blocks after which halving epochs and difficulty periods realign.
  constexpr std::uint64_t cycle_length() const { return std::lcm(halving_interval, difficulty_period); }

  constexpr std::uint64_t epoch_of(std::uint64_t height) const { return height / halving_interval; }

  constexpr std::uint64_t subsidy(std::uint64_t height) const {
    auto epoch = epoch_of(height);
    return epoch >= 64 ? 0 : initial_subsidy >> epoch;
  }

  /// First epoch in which the subsidy is zero.
  constexpr std::uint64_t terminal_epoch() const {
    std::uint64_t e = 0;
    while (e < 64 && (initial_subsidy >> e) != 0) ++e;
    return e;
  }

  /// Sum of every subsidy ever paid.
  constexpr std::uint64_t total_supply() const {
    std::uint64_t total = 0;
    for (std::uint64_t e = 0; e < terminal_epoch(); ++e) total += halving_interval * (initial_subsidy >> e);
    return total;
  }

  constexpr bool operator==(const chain_params&) const = default;
};

constexpr std::uint64_t block_subsidy(std::uint64_t height, const chain_params& p = chain_params::mainnet()) {
  return p.subsidy(height);
}

static_assert(chain_params::mainnet().total_supply() - 1 == 2'099'999'997'689'999ULL);
static_assert(chain_params::mainnet().cycle_length() == 1'260'000);

}  // namespace ordx
