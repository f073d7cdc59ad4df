#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ordx/ordx.hpp"

namespace ordx::testing {

/// Small-number chain so every sat can be tracked one by one.
inline chain_params tiny_params(std::uint64_t subsidy = 8, std::uint64_t halving = 1000, std::uint64_t period = 4) {
  chain_params p;
  p.initial_subsidy = subsidy;
  p.halving_interval = halving;
  p.difficulty_period = period;
  return p;
}

inline tx_out pay(std::uint64_t value, std::string to, script_kind k = script_kind::plain) {
  return {value, k, std::move(to)};
}

inline transaction make_tx(const std::vector<outpoint>& ins, std::vector<tx_out> outs,
                           std::vector<std::vector<bytes>> witnesses = {}) {
  transaction tx;
  for (std::size_t i = 0; i < ins.size(); ++i)
    tx.inputs.push_back({ins[i], i < witnesses.size() ? witnesses[i] : std::vector<bytes>{}});
  tx.outputs = std::move(outs);
  tx.txid = compute_txid(tx);
  return tx;
}

inline block make_block(std::uint64_t height, std::vector<tx_out> coinbase_outs, std::vector<transaction> txs = {}) {
  block b;
  b.height = height;
  b.txs.push_back(trade::make_coinbase(height, std::move(coinbase_outs)));
  for (auto& tx : txs) b.txs.push_back(std::move(tx));
  return b;
}

/// Sorted, merged copy; two range lists hold the same sats iff their
/// normalized forms are equal.
inline range_list normalized(range_list rs) {
  std::sort(rs.begin(), rs.end(), [](auto a, auto b) { return a.start < b.start; });
  range_list out;
  for (auto r : rs) {
    if (!out.empty() && out.back().end >= r.start)
      out.back().end = std::max(out.back().end, r.end);
    else
      out.push_back(r);
  }
  return out;
}

inline std::vector<std::uint64_t> expand(const range_list& rs) {
  std::vector<std::uint64_t> sats;
  for (auto r : rs)
    for (auto n = r.start; n < r.end; ++n) sats.push_back(n);
  return sats;
}

/// Tracks every sat individually. Knows nothing about ranges.
class per_sat_ledger {
 public:
  explicit per_sat_ledger(chain_params p) : p_(p) {}

  void apply(const block& b) {
    std::vector<std::uint64_t> fee_sats;
    std::map<outpoint, std::vector<std::uint64_t>> created;
    for (std::size_t t = 1; t < b.txs.size(); ++t) {
      const auto& tx = b.txs[t];
      std::vector<std::uint64_t> pool;
      for (const auto& in : tx.inputs) {
        auto it = created.find(in.prevout);
        auto& src = it != created.end() ? it->second : held_.at(in.prevout);
        pool.insert(pool.end(), src.begin(), src.end());
        if (it != created.end())
          created.erase(it);
        else
          held_.erase(in.prevout);
      }
      std::size_t k = 0;
      for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
        auto& dst = created[{tx.txid, v}];
        for (std::uint64_t i = 0; i < tx.outputs[v].value; ++i) dst.push_back(pool.at(k++));
      }
      for (; k < pool.size(); ++k) fee_sats.push_back(pool[k]);
    }
    std::vector<std::uint64_t> cb_pool;
    for (std::uint64_t i = 0; i < p_.subsidy(b.height); ++i) cb_pool.push_back(next_sat_++);
    cb_pool.insert(cb_pool.end(), fee_sats.begin(), fee_sats.end());
    const auto& cb = b.txs.front();
    std::size_t k = 0;
    for (std::uint32_t v = 0; v < cb.outputs.size(); ++v) {
      auto& dst = created[{cb.txid, v}];
      for (std::uint64_t i = 0; i < cb.outputs[v].value; ++i) dst.push_back(cb_pool.at(k++));
    }
    for (auto& [op, sats] : created) held_[op] = std::move(sats);
  }

  const std::map<outpoint, std::vector<std::uint64_t>>& held() const { return held_; }

 private:
  chain_params p_;
  std::uint64_t next_sat_ = 0;
  std::map<outpoint, std::vector<std::uint64_t>> held_;
};

/// Random valid block on top of `st`: a few transactions spending random
/// unspent outputs (including ones created earlier in the same block) with
/// random fees, then a coinbase that may underclaim.
inline block random_block(const index_state& st, std::mt19937_64& rng, std::size_t max_txs = 3) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
  const auto height = st.chain.next_height();
  std::vector<std::pair<outpoint, std::uint64_t>> avail;
  for (const auto& [op, e] : st.chain.utxos) avail.push_back({op, e.out.value});
  std::vector<transaction> txs;
  std::uint64_t fees = 0;
  const auto ntx = pick(0, max_txs);
  for (std::uint64_t t = 0; t < ntx && !avail.empty(); ++t) {
    std::shuffle(avail.begin(), avail.end(), rng);
    const auto nin = pick(1, std::min<std::uint64_t>(3, avail.size()));
    std::vector<outpoint> ins;
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < nin; ++i) {
      ins.push_back(avail.back().first);
      total += avail.back().second;
      avail.pop_back();
    }
    const auto fee = pick(0, std::min<std::uint64_t>(total, 3));
    auto left = total - fee;
    std::vector<tx_out> outs;
    const auto nout = pick(1, 3);
    for (std::uint64_t o = 0; o + 1 < nout && left > 0; ++o) {
      const auto v = pick(0, left);
      outs.push_back(pay(v, "a" + std::to_string(pick(0, 3))));
      left -= v;
    }
    outs.push_back(pay(left, "a" + std::to_string(pick(0, 3))));
    auto tx = make_tx(ins, std::move(outs));
    fees += fee;
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) avail.push_back({{tx.txid, v}, tx.outputs[v].value});
    txs.push_back(std::move(tx));
  }
  const auto budget = st.chain.params.subsidy(height) + fees;
  const auto claim = pick(0, 4) == 0 ? pick(0, budget) : budget;  // occasional underclaim burns sats
  std::vector<tx_out> cb;
  const auto first = pick(0, claim);
  cb.push_back(pay(first, "miner"));
  if (claim > first) cb.push_back(pay(claim - first, "pool"));
  return make_block(height, std::move(cb), std::move(txs));
}

/// Ranges are disjoint across the set and every entry's ranges sum to its
/// value. Returns the first problem found, empty when consistent.
inline std::string utxo_ranges_problem(const utxo_set& utxos) {
  range_list all;
  for (const auto& [op, e] : utxos) {
    if (total_size(e.ranges) != e.out.value)
      return to_string(op) + " ranges do not sum to value";
    all.insert(all.end(), e.ranges.begin(), e.ranges.end());
  }
  std::sort(all.begin(), all.end(), [](auto a, auto b) { return a.start < b.start; });
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i - 1].end > all[i].start) return "overlapping ranges at " + std::to_string(all[i].start);
  return {};
}

}  // namespace ordx::testing
