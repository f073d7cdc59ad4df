#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ordx/hash.hpp"
#include "ordx/params.hpp"

namespace ordx {

using txid_t = hash256;

struct outpoint {
  txid_t txid;
  std::uint32_t vout = 0;

  auto operator<=>(const outpoint&) const = default;
};

inline std::string to_string(const outpoint& op) { return to_hex(op.txid) + ":" + std::to_string(op.vout); }

enum class script_kind { plain, p2tr_inscription };

struct tx_out {
  std::uint64_t value = 0;
  script_kind kind = script_kind::plain;
  std::string recipient;

  bool operator==(const tx_out&) const = default;
};

struct tx_in {
  outpoint prevout;
  std::vector<bytes> witness;

  bool operator==(const tx_in&) const = default;
};

struct transaction {
  txid_t txid;
  std::vector<tx_in> inputs;
  std::vector<tx_out> outputs;
  bool is_coinbase = false;

  bool operator==(const transaction&) const = default;
};

struct block {
  std::uint64_t height = 0;
  std::vector<transaction> txs;

  bool operator==(const block&) const = default;
};

/// Half-open interval of ordinal numbers [start, end).
struct sat_range {
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  constexpr std::uint64_t size() const { return end - start; }
  constexpr bool contains(std::uint64_t n) const { return start <= n && n < end; }
  auto operator<=>(const sat_range&) const = default;
};

using range_list = std::vector<sat_range>;

inline std::uint64_t total_size(const range_list& rs) {
  std::uint64_t n = 0;
  for (const auto& r : rs) n += r.size();
  return n;
}

/// Appends `r`, coalescing with the last range when contiguous.
inline void append_range(range_list& rs, sat_range r) {
  if (r.size() == 0) return;
  if (!rs.empty() && rs.back().end == r.start)
    rs.back().end = r.end;
  else
    rs.push_back(r);
}

struct utxo_entry {
  tx_out out;
  range_list ranges;

  bool operator==(const utxo_entry&) const = default;
};

using utxo_set = std::map<outpoint, utxo_entry>;

/// Chain-level state: the UTXO set plus what is needed to validate the next block.
struct chain_state {
  chain_params params = chain_params::mainnet();
  std::optional<std::uint64_t> tip;
  utxo_set utxos;
  std::set<outpoint> spent;

  std::uint64_t next_height() const { return tip ? *tip + 1 : 0; }

  bool operator==(const chain_state&) const = default;
};

}  // namespace ordx
