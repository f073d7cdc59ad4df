#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "ordx/block_json.hpp"
#include "ordx/chain_types.hpp"
#include "ordx/error.hpp"
#include "ordx/ordinals.hpp"

namespace ordx {

/// Exact non-negative fraction, always stored in lowest terms.
struct rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static rational make(std::uint64_t n, std::uint64_t d) {
    if (d == 0) fail(errc::invariant_violation, "zero denominator");
    auto g = std::gcd(n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const rational&) const = default;
};

inline std::string to_string(const rational& r) {
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

inline std::uint64_t input_value(const transaction& tx, const utxo_set& utxos) {
  u128 sum = 0;
  for (const auto& in : tx.inputs) {
    auto it = utxos.find(in.prevout);
    if (it == utxos.end()) fail(errc::missing_prevout, to_string(in.prevout));
    sum += it->second.out.value;
  }
  if (sum > UINT64_MAX) fail(errc::invariant_violation, "input sum overflows");
  return static_cast<std::uint64_t>(sum);
}

inline std::uint64_t output_value(const transaction& tx) {
  u128 sum = 0;
  for (const auto& o : tx.outputs) sum += o.value;
  if (sum > UINT64_MAX) fail(errc::invariant_violation, "output sum overflows");
  return static_cast<std::uint64_t>(sum);
}

/// Total input value minus total output value.
inline std::uint64_t tx_fee(const transaction& tx, const utxo_set& utxos) {
  if (tx.is_coinbase) fail(errc::bad_coinbase, "a coinbase transaction pays no fee");
  const auto in = input_value(tx, utxos);
  const auto out = output_value(tx);
  if (in < out)
    fail(errc::negative_fee, "tx " + to_hex(tx.txid) + " spends " + std::to_string(in) + " but creates " +
                                 std::to_string(out));
  return in - out;
}

/// Body bytes plus a quarter of the witness bytes, rounded up.
inline std::uint64_t tx_vsize(const transaction& tx) { return body_size(tx) + (witness_size(tx) + 3) / 4; }

inline std::uint64_t tx_weight(const transaction& tx) { return 4 * body_size(tx) + witness_size(tx); }

inline rational fee_rate(const transaction& tx, const utxo_set& utxos) {
  return rational::make(tx_fee(tx, utxos), tx_vsize(tx));
}

struct block_report {
  std::uint64_t height = 0;
  std::uint64_t subsidy = 0;
  std::uint64_t fees = 0;
  std::uint64_t coinbase_claimed = 0;
  std::vector<std::uint64_t> tx_fees;  // aligned with block.txs; coinbase slot is 0
  std::vector<outpoint> spent;
  std::vector<outpoint> created;
  block_assignment sats;
};

namespace detail {
inline bool txid_known(const chain_state& st, const txid_t& txid) {
  auto u = st.utxos.lower_bound({txid, 0});
  if (u != st.utxos.end() && u->first.txid == txid) return true;
  auto s = st.spent.lower_bound({txid, 0});
  return s != st.spent.end() && s->txid == txid;
}
}  // namespace detail

/// Validates `b` against `st` and, only if every check passes, applies it:
/// spent outpoints leave the set, new outputs enter with their sat ranges.
/// On any error `st` is left untouched.
inline block_report validate_and_apply_block(const block& b, chain_state& st) {
  const auto& p = st.params;
  if (b.height != st.next_height())
    fail(errc::non_monotonic_height,
         "expected height " + std::to_string(st.next_height()) + ", got " + std::to_string(b.height));
  if (b.txs.empty() || !b.txs.front().is_coinbase)
    fail(errc::bad_coinbase, "block " + std::to_string(b.height) + " must start with a coinbase");
  if (!b.txs.front().inputs.empty()) fail(errc::bad_coinbase, "coinbase must not spend inputs");

  block_report rep;
  rep.height = b.height;
  rep.subsidy = p.subsidy(b.height);
  rep.tx_fees.assign(b.txs.size(), 0);

  std::set<txid_t> seen;
  std::map<outpoint, std::uint64_t> local;  // outputs created earlier in this block
  std::set<outpoint> spent_here;
  u128 weight = 0;
  u128 fees = 0;

  for (std::size_t t = 0; t < b.txs.size(); ++t) {
    const auto& tx = b.txs[t];
    if (t > 0 && tx.is_coinbase) fail(errc::bad_coinbase, "second coinbase at index " + std::to_string(t));
    if (!seen.insert(tx.txid).second || detail::txid_known(st, tx.txid))
      fail(errc::duplicate_txid, to_hex(tx.txid));
    weight += tx_weight(tx);

    if (t > 0) {
      u128 in_sum = 0;
      for (const auto& in : tx.inputs) {
        if (spent_here.count(in.prevout) || st.spent.count(in.prevout))
          fail(errc::double_spend, to_string(in.prevout) + " in block " + std::to_string(b.height));
        if (auto it = local.find(in.prevout); it != local.end()) {
          in_sum += it->second;
        } else if (auto u = st.utxos.find(in.prevout); u != st.utxos.end()) {
          in_sum += u->second.out.value;
        } else {
          fail(errc::missing_prevout, to_string(in.prevout) + " in block " + std::to_string(b.height));
        }
        spent_here.insert(in.prevout);
      }
      const u128 out_sum = output_value(tx);
      if (in_sum < out_sum) fail(errc::negative_fee, "tx " + to_hex(tx.txid) + " creates more than it spends");
      rep.tx_fees[t] = static_cast<std::uint64_t>(in_sum - out_sum);
      fees += in_sum - out_sum;
      for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) local[{tx.txid, v}] = tx.outputs[v].value;
    }
  }
  if (weight > p.max_block_weight)
    fail(errc::block_too_large, "block weight " + std::to_string(static_cast<std::uint64_t>(weight)));

  const u128 claimed = output_value(b.txs.front());
  if (claimed > fees + rep.subsidy)
    fail(errc::coinbase_overpay, "coinbase claims " + std::to_string(static_cast<std::uint64_t>(claimed)) +
                                     " but subsidy plus fees is " +
                                     std::to_string(static_cast<std::uint64_t>(fees + rep.subsidy)));
  rep.fees = static_cast<std::uint64_t>(fees);
  rep.coinbase_claimed = static_cast<std::uint64_t>(claimed);

  rep.sats = assign_ordinals(b, st.utxos, p);

  // Commit.
  for (const auto& op : spent_here) {
    if (st.utxos.erase(op)) rep.spent.push_back(op);
    st.spent.insert(op);
  }
  for (const auto& tx : b.txs) {
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
      outpoint op{tx.txid, v};
      if (spent_here.count(op)) continue;
      st.utxos[op] = utxo_entry{tx.outputs[v], rep.sats.outputs.at(op)};
      rep.created.push_back(op);
    }
  }
  st.tip = b.height;
  return rep;
}

inline std::uint64_t utxo_total(const utxo_set& utxos) {
  std::uint64_t n = 0;
  for (const auto& [op, e] : utxos) n += e.out.value;
  return n;
}

}  // namespace ordx
