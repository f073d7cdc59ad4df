#pragma once

#include <istream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ordx/chain_types.hpp"

// JSON and JSONL encoding of blocks. Objects use nlohmann's default
// std::map-backed json, so keys always serialize sorted.

namespace ordx {

using json = nlohmann::json;

inline std::string to_string(script_kind k) { return k == script_kind::plain ? "plain" : "p2tr_inscription"; }

inline script_kind script_kind_from_string(const std::string& s) {
  if (s == "plain") return script_kind::plain;
  if (s == "p2tr_inscription") return script_kind::p2tr_inscription;
  fail(errc::parse_error, "unknown script_kind '" + s + "'");
}

inline json to_json(const outpoint& op) { return {{"txid", to_hex(op.txid)}, {"vout", op.vout}}; }

inline json to_json(const tx_out& o) {
  return {{"value", o.value}, {"recipient", o.recipient}, {"script_kind", to_string(o.kind)}};
}

inline json to_json(const transaction& tx, bool with_witness = true) {
  json inputs = json::array();
  for (const auto& in : tx.inputs) {
    json j = to_json(in.prevout);
    if (with_witness) {
      json w = json::array();
      for (const auto& item : in.witness) w.push_back(to_hex(item));
      j["witness"] = std::move(w);
    }
    inputs.push_back(std::move(j));
  }
  json outputs = json::array();
  for (const auto& o : tx.outputs) outputs.push_back(to_json(o));
  return {{"txid", to_hex(tx.txid)}, {"coinbase", tx.is_coinbase}, {"inputs", std::move(inputs)},
          {"outputs", std::move(outputs)}};
}

inline json to_json(const block& b) {
  json txs = json::array();
  for (const auto& tx : b.txs) txs.push_back(to_json(tx));
  return {{"height", b.height}, {"txs", std::move(txs)}};
}

namespace detail {
template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(errc::parse_error, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("bad field '") + key + "': " + e.what());
  }
}

inline std::uint64_t require_u64(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(errc::parse_error, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) fail(errc::parse_error, std::string("field '") + key + "' must be an unsigned integer");
  return v.get<std::uint64_t>();
}
}  // namespace detail

inline outpoint outpoint_from_json(const json& j) {
  auto vout = detail::require_u64(j, "vout");
  if (vout > UINT32_MAX) fail(errc::parse_error, "vout out of range");
  return {hash_from_hex(detail::require<std::string>(j, "txid")), static_cast<std::uint32_t>(vout)};
}

inline transaction transaction_from_json(const json& j) {
  transaction tx;
  tx.txid = hash_from_hex(detail::require<std::string>(j, "txid"));
  tx.is_coinbase = detail::require<bool>(j, "coinbase");
  for (const auto& ji : detail::require<json>(j, "inputs")) {
    tx_in in;
    in.prevout = outpoint_from_json(ji);
    if (ji.contains("witness"))
      for (const auto& w : ji.at("witness")) in.witness.push_back(from_hex(w.get<std::string>()));
    tx.inputs.push_back(std::move(in));
  }
  for (const auto& jo : detail::require<json>(j, "outputs")) {
    tx_out o;
    o.value = detail::require_u64(jo, "value");
    o.recipient = detail::require<std::string>(jo, "recipient");
    o.kind = script_kind_from_string(detail::require<std::string>(jo, "script_kind"));
    tx.outputs.push_back(std::move(o));
  }
  return tx;
}

inline block block_from_json(const json& j) {
  block b;
  b.height = detail::require_u64(j, "height");
  for (const auto& jt : detail::require<json>(j, "txs")) b.txs.push_back(transaction_from_json(jt));
  return b;
}

/// Reads one block per non-blank line.
inline std::vector<block> read_blocks_jsonl(std::istream& in) {
  std::vector<block> blocks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(errc::parse_error, "line " + std::to_string(lineno) + ": " + e.what());
    }
    blocks.push_back(block_from_json(j));
  }
  return blocks;
}

inline std::string to_jsonl(const std::vector<block>& blocks) {
  std::string out;
  for (const auto& b : blocks) out += to_json(b).dump() + "\n";
  return out;
}

/// Byte length of the canonical serialization without witness data.
inline std::uint64_t body_size(const transaction& tx) { return to_json(tx, false).dump().size(); }

inline std::uint64_t witness_size(const transaction& tx) {
  std::uint64_t n = 0;
  for (const auto& in : tx.inputs)
    for (const auto& item : in.witness) n += item.size();
  return n;
}

/// Content hash of a transaction: sha256 over the witness-free canonical
/// serialization with the txid field omitted.
inline txid_t compute_txid(const transaction& tx) {
  json j = to_json(tx, false);
  j.erase("txid");
  return sha256(j.dump());
}

}  // namespace ordx
