#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ordx/block_json.hpp"
#include "ordx/chain_types.hpp"
#include "ordx/error.hpp"
#include "ordx/hash.hpp"

// Partially signed transactions with simulated signatures. A signature is a
// hash commitment over the parts of the transaction its scope covers, so any
// change to a covered input or output invalidates it.

namespace ordx::trade {

using json = nlohmann::json;

enum class sighash {
  all,               // every input outpoint and every output
  input_and_output,  // the signed input plus one output, wherever it ends up
};

inline std::string to_string(sighash s) { return s == sighash::all ? "all" : "input_and_output"; }

inline sighash sighash_from_string(const std::string& s) {
  if (s == "all") return sighash::all;
  if (s == "input_and_output") return sighash::input_and_output;
  fail(errc::parse_error, "unknown sighash '" + s + "'");
}

struct sim_signature {
  std::string signer;
  sighash scope = sighash::all;
  hash256 commitment;

  auto operator<=>(const sim_signature&) const = default;
};

struct psbt_input {
  outpoint prevout;
  std::uint64_t value = 0;
  std::string owner;  // the party whose signature this input requires
  std::optional<std::string> inscription_id;
  std::set<sim_signature> signatures;

  bool same_structure(const psbt_input& o) const {
    return prevout == o.prevout && value == o.value && owner == o.owner && inscription_id == o.inscription_id;
  }
  bool operator==(const psbt_input&) const = default;
};

struct psbt {
  std::vector<psbt_input> inputs;
  std::vector<tx_out> outputs;
  bool finalized = false;

  bool same_structure(const psbt& o) const {
    if (inputs.size() != o.inputs.size() || outputs != o.outputs) return false;
    for (std::size_t i = 0; i < inputs.size(); ++i)
      if (!inputs[i].same_structure(o.inputs[i])) return false;
    return true;
  }
  bool operator==(const psbt&) const = default;
};

namespace detail {
inline std::string output_preimage(const tx_out& o) {
  return std::to_string(o.value) + "/" + o.recipient + "/" + to_string(o.kind);
}

inline hash256 commit_all(const psbt& p, const std::string& signer) {
  std::string pre = "all|" + signer;
  for (const auto& in : p.inputs) pre += "|in:" + to_string(in.prevout);
  for (const auto& o : p.outputs) pre += "|out:" + output_preimage(o);
  return sha256(pre);
}

inline hash256 commit_io(const psbt_input& in, const tx_out& o, const std::string& signer) {
  return sha256("io|" + signer + "|in:" + to_string(in.prevout) + "|out:" + output_preimage(o));
}
}  // namespace detail

/// Signs input `index`. For `input_and_output`, `output_index` names the
/// output the signer commits to.
inline void sign(psbt& p, std::size_t index, const std::string& signer, sighash scope,
                 std::size_t output_index = 0) {
  if (index >= p.inputs.size()) fail(errc::structure_mismatch, "no input " + std::to_string(index));
  hash256 c;
  if (scope == sighash::all) {
    c = detail::commit_all(p, signer);
  } else {
    if (output_index >= p.outputs.size()) fail(errc::structure_mismatch, "no output " + std::to_string(output_index));
    c = detail::commit_io(p.inputs[index], p.outputs[output_index], signer);
  }
  p.inputs[index].signatures.insert({signer, scope, c});
}

inline bool verify(const psbt& p, std::size_t index, const sim_signature& sig) {
  if (sig.scope == sighash::all) return detail::commit_all(p, sig.signer) == sig.commitment;
  for (const auto& o : p.outputs)
    if (detail::commit_io(p.inputs[index], o, sig.signer) == sig.commitment) return true;
  return false;
}

/// Every input carries a valid signature from its owner and every signature verifies.
inline bool fully_signed(const psbt& p) {
  if (p.outputs.empty()) return false;
  for (std::size_t i = 0; i < p.inputs.size(); ++i) {
    bool owner_signed = false;
    for (const auto& s : p.inputs[i].signatures) {
      if (!verify(p, i, s)) return false;
      owner_signed |= s.signer == p.inputs[i].owner;
    }
    if (!owner_signed) return false;
  }
  return true;
}

/// Union of signature sets over identical structure; commutative,
/// associative and idempotent.
inline psbt combine(const psbt& a, const psbt& b) {
  if (!a.same_structure(b)) fail(errc::structure_mismatch, "psbts describe different transactions");
  psbt out = a;
  for (std::size_t i = 0; i < out.inputs.size(); ++i)
    out.inputs[i].signatures.insert(b.inputs[i].signatures.begin(), b.inputs[i].signatures.end());
  out.finalized = a.finalized || b.finalized;
  return out;
}

inline void finalize(psbt& p) {
  if (!fully_signed(p)) fail(errc::signature_invalid, "psbt is missing or has invalid signatures");
  p.finalized = true;
}

/// The broadcastable transaction. Each input's witness holds its signature
/// commitments; the txid covers only the witness-free body.
inline transaction extract_transaction(const psbt& p) {
  transaction tx;
  for (const auto& in : p.inputs) {
    tx_in ti{in.prevout, {}};
    for (const auto& s : in.signatures) ti.witness.emplace_back(s.commitment.v.begin(), s.commitment.v.end());
    tx.inputs.push_back(std::move(ti));
  }
  tx.outputs = p.outputs;
  tx.txid = compute_txid(tx);
  return tx;
}

// --- offers ----------------------------------------------------------------

enum class offer_status { open, accepted, settled, cancelled, stale };

inline std::string to_string(offer_status s) {
  switch (s) {
    case offer_status::open: return "open";
    case offer_status::accepted: return "accepted";
    case offer_status::settled: return "settled";
    case offer_status::cancelled: return "cancelled";
    case offer_status::stale: return "stale";
  }
  return "open";
}

inline offer_status offer_status_from_string(const std::string& s) {
  for (auto st : {offer_status::open, offer_status::accepted, offer_status::settled, offer_status::cancelled,
                  offer_status::stale})
    if (to_string(st) == s) return st;
  fail(errc::parse_error, "unknown offer status '" + s + "'");
}

struct offer {
  std::string id;
  std::string seller;
  std::string inscription_id;
  std::uint64_t ask = 0;
  trade::psbt psbt;
  offer_status status = offer_status::open;
  std::string buyer;
  std::uint64_t fee = 0;
  std::optional<txid_t> settlement_txid;

  bool live() const { return status == offer_status::open || status == offer_status::accepted; }
  bool operator==(const offer&) const = default;
};

struct offer_book {
  std::map<std::string, offer> offers;
  std::uint64_t next_id = 0;

  bool operator==(const offer_book&) const = default;
};

inline json to_json(const psbt& p) {
  json inputs = json::array();
  for (const auto& in : p.inputs) {
    json sigs = json::array();
    for (const auto& s : in.signatures)
      sigs.push_back({{"signer", s.signer}, {"scope", to_string(s.scope)}, {"commitment", to_hex(s.commitment)}});
    json j{{"prevout", ordx::to_json(in.prevout)}, {"value", in.value}, {"owner", in.owner}, {"signatures", sigs}};
    j["inscription_id"] = in.inscription_id ? json(*in.inscription_id) : json(nullptr);
    inputs.push_back(std::move(j));
  }
  json outputs = json::array();
  for (const auto& o : p.outputs) outputs.push_back(ordx::to_json(o));
  return {{"inputs", inputs}, {"outputs", outputs}, {"finalized", p.finalized}};
}

inline psbt psbt_from_json(const json& j) {
  psbt p;
  for (const auto& ji : j.at("inputs")) {
    psbt_input in;
    in.prevout = outpoint_from_json(ji.at("prevout"));
    in.value = ji.at("value").get<std::uint64_t>();
    in.owner = ji.at("owner").get<std::string>();
    if (!ji.at("inscription_id").is_null()) in.inscription_id = ji.at("inscription_id").get<std::string>();
    for (const auto& s : ji.at("signatures")) {
      hash256 c = hash_from_hex(s.at("commitment").get<std::string>());
      in.signatures.insert({s.at("signer").get<std::string>(), sighash_from_string(s.at("scope")), c});
    }
    p.inputs.push_back(std::move(in));
  }
  for (const auto& jo : j.at("outputs"))
    p.outputs.push_back({jo.at("value").get<std::uint64_t>(), script_kind_from_string(jo.at("script_kind")),
                         jo.at("recipient").get<std::string>()});
  p.finalized = j.at("finalized").get<bool>();
  return p;
}

inline json to_json(const offer_book& book) {
  json offers = json::object();
  for (const auto& [id, o] : book.offers)
    offers[id] = {{"seller", o.seller},
                  {"inscription_id", o.inscription_id},
                  {"ask", o.ask},
                  {"psbt", to_json(o.psbt)},
                  {"status", to_string(o.status)},
                  {"buyer", o.buyer},
                  {"fee", o.fee},
                  {"settlement_txid", o.settlement_txid ? json(to_hex(*o.settlement_txid)) : json(nullptr)}};
  return {{"offers", offers}, {"next_id", book.next_id}};
}

inline offer_book offer_book_from_json(const json& j) {
  offer_book book;
  book.next_id = j.at("next_id").get<std::uint64_t>();
  for (const auto& [id, jo] : j.at("offers").items()) {
    offer o;
    o.id = id;
    o.seller = jo.at("seller").get<std::string>();
    o.inscription_id = jo.at("inscription_id").get<std::string>();
    o.ask = jo.at("ask").get<std::uint64_t>();
    o.psbt = psbt_from_json(jo.at("psbt"));
    o.status = offer_status_from_string(jo.at("status").get<std::string>());
    o.buyer = jo.at("buyer").get<std::string>();
    o.fee = jo.at("fee").get<std::uint64_t>();
    if (!jo.at("settlement_txid").is_null())
      o.settlement_txid = hash_from_hex(jo.at("settlement_txid").get<std::string>());
    book.offers[id] = std::move(o);
  }
  return book;
}

}  // namespace ordx::trade
