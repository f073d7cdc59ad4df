#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordx/chain_types.hpp"
#include "ordx/error.hpp"
#include "ordx/params.hpp"

// Ordinal theory: every satoshi is numbered in the order it was mined and
// follows first-in-first-out through transactions.

namespace ordx {

using u128 = unsigned __int128;

constexpr std::uint64_t last_sat(const chain_params& p = chain_params::mainnet()) { return p.total_supply() - 1; }

struct satpoint {
  ordx::outpoint outpoint;
  std::uint64_t offset = 0;

  auto operator<=>(const satpoint&) const = default;
};

inline std::string to_string(const satpoint& sp) { return to_string(sp.outpoint) + ":" + std::to_string(sp.offset); }

/// Ordinal of the first sat mined in block `height`.
inline std::uint64_t start_sat_of_block(std::uint64_t height, const chain_params& p = chain_params::mainnet()) {
  if (p.subsidy(height) == 0) fail(errc::height_beyond_supply, "no subsidy at height " + std::to_string(height));
  const auto epoch = p.epoch_of(height);
  std::uint64_t sat = 0;
  for (std::uint64_t e = 0; e < epoch; ++e) sat += p.halving_interval * (p.initial_subsidy >> e);
  return sat + (height - epoch * p.halving_interval) * p.subsidy(height);
}

struct decimal_position {
  std::uint64_t height = 0;
  std::uint64_t offset = 0;

  bool operator==(const decimal_position&) const = default;
};

inline void check_sat(std::uint64_t n, const chain_params& p) {
  if (n > last_sat(p)) fail(errc::invalid_notation, "sat " + std::to_string(n) + " exceeds the total supply");
}

inline decimal_position sat_to_decimal(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  check_sat(n, p);
  std::uint64_t epoch_start = 0;
  for (std::uint64_t e = 0;; ++e) {
    const std::uint64_t subsidy = p.initial_subsidy >> e;
    const std::uint64_t epoch_sats = p.halving_interval * subsidy;
    if (n < epoch_start + epoch_sats) {
      const std::uint64_t rel = n - epoch_start;
      return {e * p.halving_interval + rel / subsidy, rel % subsidy};
    }
    epoch_start += epoch_sats;
  }
}

inline std::uint64_t sat_from_decimal(std::uint64_t height, std::uint64_t offset,
                                      const chain_params& p = chain_params::mainnet()) {
  const auto start = start_sat_of_block(height, p);
  if (offset >= p.subsidy(height))
    fail(errc::offset_out_of_block,
         "offset " + std::to_string(offset) + " not below block subsidy " + std::to_string(p.subsidy(height)));
  return start + offset;
}

inline std::string format_decimal(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  auto d = sat_to_decimal(n, p);
  return std::to_string(d.height) + "." + std::to_string(d.offset);
}

namespace detail {
inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
  if (s.empty() || s.size() > 20) return std::nullopt;
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  if (v > UINT64_MAX) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

inline std::uint64_t expect_u64(std::string_view s, std::string_view what) {
  auto v = parse_u64(s);
  if (!v) fail(errc::invalid_notation, std::string("bad number in ") + std::string(what) + ": '" + std::string(s) + "'");
  return *v;
}

inline std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

inline u128 pow10(unsigned k) {
  u128 r = 1;
  while (k--) r *= 10;
  return r;
}
}  // namespace detail

inline std::uint64_t parse_decimal(std::string_view s, const chain_params& p = chain_params::mainnet()) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos) fail(errc::invalid_notation, "decimal notation needs 'height.offset'");
  return sat_from_decimal(detail::expect_u64(s.substr(0, dot), "decimal notation"),
                          detail::expect_u64(s.substr(dot + 1), "decimal notation"), p);
}

// --- degree notation -------------------------------------------------------

namespace glyph {
inline constexpr std::string_view degree = "°";
inline constexpr std::string_view minute = "′";
inline constexpr std::string_view second = "″";
inline constexpr std::string_view third = "‴";
}  // namespace glyph

struct degree_position {
  std::uint64_t cycle = 0;          // height / cycle length
  std::uint64_t epoch_offset = 0;   // height % halving interval
  std::uint64_t period_offset = 0;  // height % difficulty period
  std::uint64_t offset = 0;         // offset within block

  bool operator==(const degree_position&) const = default;
};

inline degree_position sat_to_degree_position(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  auto d = sat_to_decimal(n, p);
  return {d.height / p.cycle_length(), d.height % p.halving_interval, d.height % p.difficulty_period, d.offset};
}

inline std::string sat_to_degree(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  auto d = sat_to_degree_position(n, p);
  std::string s = std::to_string(d.cycle);
  s += glyph::degree;
  s += std::to_string(d.epoch_offset);
  s += glyph::minute;
  s += std::to_string(d.period_offset);
  s += glyph::second;
  s += std::to_string(d.offset);
  s += glyph::third;
  return s;
}

inline std::uint64_t sat_from_degree_position(const degree_position& d, const chain_params& p = chain_params::mainnet()) {
  if (d.epoch_offset >= p.halving_interval || d.period_offset >= p.difficulty_period)
    fail(errc::invalid_notation, "degree component out of range");
  // The epoch within the cycle is the unique one consistent with the period offset.
  const std::uint64_t epochs_per_cycle = p.cycle_length() / p.halving_interval;
  for (std::uint64_t k = 0; k < epochs_per_cycle; ++k) {
    const std::uint64_t height = d.cycle * p.cycle_length() + k * p.halving_interval + d.epoch_offset;
    if (height % p.difficulty_period == d.period_offset) return sat_from_decimal(height, d.offset, p);
  }
  fail(errc::invalid_notation, "degree components do not name a block");
}

inline std::uint64_t parse_degree(std::string_view s, const chain_params& p = chain_params::mainnet()) {
  degree_position d;
  std::uint64_t* fields[] = {&d.cycle, &d.epoch_offset, &d.period_offset, &d.offset};
  std::string_view marks[] = {glyph::degree, glyph::minute, glyph::second, glyph::third};
  for (int i = 0; i < 4; ++i) {
    auto pos = s.find(marks[i]);
    if (pos == std::string_view::npos) fail(errc::invalid_notation, "degree notation needs A°B′C″D‴");
    *fields[i] = detail::expect_u64(s.substr(0, pos), "degree notation");
    s.remove_prefix(pos + marks[i].size());
  }
  if (!s.empty()) fail(errc::invalid_notation, "trailing characters after degree notation");
  return sat_from_degree_position(d, p);
}

// --- percentile notation ---------------------------------------------------

namespace detail {
// Sat nearest to mantissa / 10^scale percent, ties rounding up.
inline u128 percentile_to_sat(u128 mantissa, unsigned scale, std::uint64_t last) {
  const u128 denom = 100 * pow10(scale);
  return (2 * mantissa * last + denom) / (2 * denom);
}
}  // namespace detail

/// n / last * 100 as the shortest decimal that parses back to n; at each
/// length the truncated value is preferred over the rounded-up one.
inline std::string sat_to_percentile(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  check_sat(n, p);
  const std::uint64_t last = last_sat(p);
  for (unsigned scale = 0; scale <= 20; ++scale) {
    const u128 floor_m = static_cast<u128>(n) * 100 * detail::pow10(scale) / last;
    for (u128 m : {floor_m, floor_m + 1}) {
      if (detail::percentile_to_sat(m, scale, last) != n) continue;
      std::string digits = detail::u128_to_string(m);
      if (scale > 0) {
        if (digits.size() <= scale) digits.insert(0, scale - digits.size() + 1, '0');
        digits.insert(digits.size() - scale, ".");
      }
      return digits + "%";
    }
  }
  fail(errc::invariant_violation, "no round-tripping percentile for sat " + std::to_string(n));
}

inline std::uint64_t parse_percentile(std::string_view s, const chain_params& p = chain_params::mainnet()) {
  if (s.empty() || s.back() != '%') fail(errc::invalid_notation, "percentile notation must end with '%'");
  s.remove_suffix(1);
  auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && frac.empty()) || frac.size() > 20)
    fail(errc::invalid_notation, "malformed percentile");
  u128 mantissa = detail::expect_u64(whole, "percentile");
  if (mantissa > 100) fail(errc::invalid_notation, "percentile above 100");
  for (char c : frac) {
    if (c < '0' || c > '9') fail(errc::invalid_notation, "malformed percentile");
    mantissa = mantissa * 10 + static_cast<unsigned>(c - '0');
  }
  const auto scale = static_cast<unsigned>(frac.size());
  if (mantissa > 100 * detail::pow10(scale)) fail(errc::invalid_notation, "percentile above 100");
  return static_cast<std::uint64_t>(detail::percentile_to_sat(mantissa, scale, last_sat(p)));
}

// --- name notation ---------------------------------------------------------

/// Bijective base-26 of (last - n + 1), 'a' = 1 ... 'z' = 26, most significant
/// digit first. Names shorten toward the final sat, which is "a".
inline std::string sat_to_name(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  check_sat(n, p);
  std::uint64_t x = last_sat(p) - n + 1;
  std::string name;
  while (x > 0) {
    name.push_back(static_cast<char>('a' + (x - 1) % 26));
    x = (x - 1) / 26;
  }
  return {name.rbegin(), name.rend()};
}

inline std::uint64_t sat_from_name(std::string_view name, const chain_params& p = chain_params::mainnet()) {
  if (name.empty()) fail(errc::invalid_name_char, "empty name");
  const u128 limit = static_cast<u128>(last_sat(p)) + 1;
  u128 x = 0;
  for (char c : name) {
    if (c < 'a' || c > 'z') fail(errc::invalid_name_char, std::string("character '") + c + "' is not in a-z");
    x = x * 26 + static_cast<unsigned>(c - 'a' + 1);
    if (x > limit) fail(errc::name_out_of_range, "name '" + std::string(name) + "' is beyond sat 0");
  }
  return static_cast<std::uint64_t>(limit - x);
}

// --- rarity ----------------------------------------------------------------

enum class rarity { common, uncommon, rare, epic, legendary, mythic };

constexpr std::string_view to_string(rarity r) {
  switch (r) {
    case rarity::common: return "common";
    case rarity::uncommon: return "uncommon";
    case rarity::rare: return "rare";
    case rarity::epic: return "epic";
    case rarity::legendary: return "legendary";
    case rarity::mythic: return "mythic";
  }
  return "common";
}

inline rarity sat_rarity(std::uint64_t n, const chain_params& p = chain_params::mainnet()) {
  if (n == 0) return rarity::mythic;
  auto d = sat_to_decimal(n, p);
  if (d.offset != 0) return rarity::common;
  if (d.height % p.cycle_length() == 0) return rarity::legendary;
  if (d.height % p.halving_interval == 0) return rarity::epic;
  if (d.height % p.difficulty_period == 0) return rarity::rare;
  return rarity::uncommon;
}

/// Accepts any of the notations: integer, decimal, degree, percentile, name.
inline std::uint64_t parse_sat(std::string_view s, const chain_params& p = chain_params::mainnet()) {
  if (s.empty()) fail(errc::invalid_notation, "empty sat");
  if (s.find(glyph::degree) != std::string_view::npos) return parse_degree(s, p);
  if (s.back() == '%') return parse_percentile(s, p);
  if (s.find('.') != std::string_view::npos) return parse_decimal(s, p);
  if (s.front() >= '0' && s.front() <= '9') {
    auto n = detail::expect_u64(s, "integer notation");
    check_sat(n, p);
    return n;
  }
  return sat_from_name(s, p);
}

// --- FIFO assignment -------------------------------------------------------

struct fifo_split {
  std::vector<range_list> outputs;
  range_list remainder;
};

/// Slices the concatenation of `inputs` into consecutive chunks of the given
/// sizes. Whatever is left over is returned as the remainder.
inline fifo_split slice_fifo(std::span<const range_list> inputs, std::span<const std::uint64_t> sizes) {
  fifo_split out;
  out.outputs.resize(sizes.size());
  std::size_t out_idx = 0;
  std::uint64_t need = sizes.empty() ? 0 : sizes[0];
  auto advance = [&] {
    while (out_idx < sizes.size() && need == 0) {
      ++out_idx;
      need = out_idx < sizes.size() ? sizes[out_idx] : 0;
    }
  };
  advance();
  for (const auto& list : inputs) {
    for (sat_range r : list) {
      while (r.size() > 0) {
        if (out_idx >= sizes.size()) {
          append_range(out.remainder, r);
          break;
        }
        const std::uint64_t take = std::min(need, r.size());
        append_range(out.outputs[out_idx], {r.start, r.start + take});
        r.start += take;
        need -= take;
        advance();
      }
    }
  }
  if (out_idx < sizes.size()) fail(errc::range_value_mismatch, "inputs hold fewer sats than the outputs require");
  return out;
}

/// Where the sats of one transaction came from and went.
struct tx_flow {
  range_list inputs;  // concatenated, in input order
  std::vector<range_list> outputs;
  range_list remainder;  // fee sats, or burned sats for the coinbase
};

struct block_assignment {
  std::map<outpoint, range_list> outputs;  // every output created in the block
  std::vector<tx_flow> flows;              // aligned with block.txs
  range_list subsidy;
  range_list fee_tail;
  range_list burned;
};

/// Runs FIFO assignment over a block. Fee sats of each transaction, in
/// transaction order, follow the freshly minted subsidy into the coinbase.
/// Whatever the coinbase leaves unclaimed is burned.
inline block_assignment assign_ordinals(const block& b, const utxo_set& utxos,
                                        const chain_params& p = chain_params::mainnet()) {
  block_assignment a;
  if (b.txs.empty() || !b.txs.front().is_coinbase) fail(errc::bad_coinbase, "block must start with a coinbase");
  a.flows.resize(b.txs.size());

  for (std::size_t t = 1; t < b.txs.size(); ++t) {
    const auto& tx = b.txs[t];
    std::vector<range_list> ins;
    ins.reserve(tx.inputs.size());
    for (const auto& in : tx.inputs) {
      if (auto it = a.outputs.find(in.prevout); it != a.outputs.end()) {
        ins.push_back(std::move(it->second));
        a.outputs.erase(it);
        continue;
      }
      auto it = utxos.find(in.prevout);
      if (it == utxos.end()) fail(errc::missing_prevout, to_string(in.prevout));
      if (total_size(it->second.ranges) != it->second.out.value)
        fail(errc::range_value_mismatch, "ranges of " + to_string(in.prevout) + " do not sum to its value");
      ins.push_back(it->second.ranges);
    }
    std::vector<std::uint64_t> sizes;
    for (const auto& o : tx.outputs) sizes.push_back(o.value);
    auto split = slice_fifo(ins, sizes);
    auto& flow = a.flows[t];
    for (const auto& list : ins)
      for (auto r : list) append_range(flow.inputs, r);
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) a.outputs[{tx.txid, v}] = split.outputs[v];
    for (auto r : split.remainder) append_range(a.fee_tail, r);
    flow.outputs = std::move(split.outputs);
    flow.remainder = std::move(split.remainder);
  }

  const auto& cb = b.txs.front();
  if (p.subsidy(b.height) > 0) {
    const auto start = start_sat_of_block(b.height, p);
    a.subsidy.push_back({start, start + p.subsidy(b.height)});
  }
  std::vector<range_list> cb_in{a.subsidy, a.fee_tail};
  std::vector<std::uint64_t> sizes;
  for (const auto& o : cb.outputs) sizes.push_back(o.value);
  auto split = slice_fifo(cb_in, sizes);
  auto& flow = a.flows.front();
  for (const auto& list : cb_in)
    for (auto r : list) append_range(flow.inputs, r);
  for (std::uint32_t v = 0; v < cb.outputs.size(); ++v) a.outputs[{cb.txid, v}] = split.outputs[v];
  a.burned = split.remainder;
  flow.outputs = std::move(split.outputs);
  flow.remainder = std::move(split.remainder);
  return a;
}

/// Point-lookup index from sat to its current location in a UTXO set.
class sat_index {
 public:
  explicit sat_index(const utxo_set& utxos) {
    for (const auto& [op, entry] : utxos) {
      std::uint64_t base = 0;
      for (const auto& r : entry.ranges) {
        by_start_.emplace(r.start, slot{r.end, op, base});
        base += r.size();
      }
    }
  }

  std::optional<satpoint> find(std::uint64_t n) const {
    auto it = by_start_.upper_bound(n);
    if (it == by_start_.begin()) return std::nullopt;
    --it;
    if (n >= it->second.end) return std::nullopt;
    return satpoint{it->second.op, it->second.base + (n - it->first)};
  }

 private:
  struct slot {
    std::uint64_t end;
    outpoint op;
    std::uint64_t base;
  };
  std::map<std::uint64_t, slot> by_start_;
};

inline satpoint locate_sat(std::uint64_t n, const utxo_set& utxos) {
  if (auto sp = sat_index(utxos).find(n)) return *sp;
  fail(errc::sat_not_in_utxo_set, "sat " + std::to_string(n) + " is not held by any unspent output");
}

}  // namespace ordx
