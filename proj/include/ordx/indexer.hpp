#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ordx/block_json.hpp"
#include "ordx/brc20.hpp"
#include "ordx/chain.hpp"
#include "ordx/inscription.hpp"
#include "ordx/ordinals.hpp"
#include "ordx/psbt.hpp"

// The indexing pipeline: validate and apply a block, run FIFO assignment,
// extract inscriptions, replay BRC-20 events and settle trades. Everything it
// knows lives in `index_state`, which serializes to a canonical snapshot.

namespace ordx {

struct diagnostic {
  std::uint64_t height = 0;
  std::string subject;  // txid or inscription id
  std::string message;

  bool operator==(const diagnostic&) const = default;
};

struct index_state {
  chain_state chain;
  std::vector<inscription> inscriptions;
  brc20::ledger ledger;
  trade::offer_book offers;
  std::vector<diagnostic> diagnostics;

  // Derived lookups, rebuilt on load.
  std::map<std::string, std::size_t> inscription_by_id;
  std::map<std::uint64_t, std::vector<std::string>> inscribed_sats;

  index_state() = default;
  explicit index_state(const chain_params& p) { chain.params = p; }

  const inscription* find_inscription(const std::string& id) const {
    auto it = inscription_by_id.find(id);
    return it == inscription_by_id.end() ? nullptr : &inscriptions[it->second];
  }

  void add_inscription(inscription ins) {
    inscription_by_id[ins.id] = inscriptions.size();
    inscribed_sats[ins.genesis_sat].push_back(ins.id);
    inscriptions.push_back(std::move(ins));
  }

  bool holds_inscription(const range_list& ranges) const {
    for (const auto& r : ranges) {
      auto it = inscribed_sats.lower_bound(r.start);
      if (it != inscribed_sats.end() && it->first < r.end) return true;
    }
    return false;
  }
};

namespace detail {

inline std::optional<std::size_t> output_holding(const std::vector<range_list>& outputs, std::uint64_t sat) {
  for (std::size_t v = 0; v < outputs.size(); ++v)
    for (const auto& r : outputs[v])
      if (r.contains(sat)) return v;
  return std::nullopt;
}

// Settles every unused transfer inscription whose sat moves in tx `t`.
inline void settle_moves(index_state& st, const block& b, const block_assignment& sats, std::size_t t) {
  const auto& tx = b.txs[t];
  const auto& flow = sats.flows[t];
  for (const auto& r : flow.inputs) {
    for (auto it = st.inscribed_sats.lower_bound(r.start); it != st.inscribed_sats.end() && it->first < r.end; ++it) {
      const std::uint64_t sat = it->first;
      for (const auto& id : it->second) {
        auto p = st.ledger.pendings.find(id);
        if (p == st.ledger.pendings.end() || p->second.used) continue;
        const std::string sender = p->second.owner;
        std::string receiver;
        if (auto v = output_holding(flow.outputs, sat)) {
          receiver = tx.outputs[*v].recipient;
        } else if (auto c = output_holding(sats.flows.front().outputs, sat)) {
          receiver = b.txs.front().outputs[*c].recipient;
          st.diagnostics.push_back({b.height, id, "transfer inscription spent as fee; settled to miner " + receiver});
        } else {
          receiver = sender;
          st.diagnostics.push_back({b.height, id, "transfer inscription burned; amount returned to " + sender});
        }
        try {
          brc20::settle_transfer(st.ledger, id, sender, receiver);
        } catch (const error& e) {
          st.diagnostics.push_back({b.height, id, e.what()});
        }
      }
    }
  }
}

inline bool looks_like_json(const envelope& env) {
  for (auto c : env.body) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{';
  }
  return false;
}

inline void apply_brc20(index_state& st, const inscription& ins) {
  brc20::operation op;
  try {
    op = brc20::parse(ins.content);
  } catch (const error& e) {
    if (looks_like_json(ins.content)) st.diagnostics.push_back({ins.height, ins.id, e.what()});
    return;
  }
  try {
    if (auto* d = std::get_if<brc20::deploy_op>(&op))
      brc20::apply_deploy(st.ledger, *d, ins.id, ins.height);
    else if (auto* m = std::get_if<brc20::mint_op>(&op))
      brc20::apply_mint(st.ledger, *m, ins.genesis_owner);
    else
      brc20::inscribe_transfer(st.ledger, std::get<brc20::transfer_op>(op), ins.id, ins.genesis_owner);
  } catch (const error& e) {
    st.diagnostics.push_back({ins.height, ins.id, e.what()});
  }
}

inline void update_offers(index_state& st, const block& b) {
  std::map<outpoint, txid_t> spender;
  for (const auto& tx : b.txs)
    for (const auto& in : tx.inputs) spender[in.prevout] = tx.txid;
  for (auto& [id, o] : st.offers.offers) {
    if (!o.live() || o.psbt.inputs.empty()) continue;
    auto it = spender.find(o.psbt.inputs.front().prevout);
    if (it == spender.end()) continue;
    o.status = o.settlement_txid && *o.settlement_txid == it->second ? trade::offer_status::settled
                                                                     : trade::offer_status::stale;
  }
}

}  // namespace detail

/// Runs the full pipeline for one block. Chain-level errors throw before any
/// state changes; token-level problems become diagnostics.
inline block_report process_block(index_state& st, const block& b) {
  block_report rep = validate_and_apply_block(b, st.chain);

  auto ex = extract_inscriptions(b, rep.sats.outputs, st.inscriptions.size());
  for (const auto& d : ex.diagnostics) st.diagnostics.push_back({b.height, d.txid, d.message});
  std::map<std::string, std::vector<inscription>> revealed;
  for (auto& ins : ex.inscriptions) revealed[ins.id.substr(0, 64)].push_back(std::move(ins));

  for (std::size_t t = 0; t < b.txs.size(); ++t) {
    if (t > 0) detail::settle_moves(st, b, rep.sats, t);
    auto it = revealed.find(to_hex(b.txs[t].txid));
    if (it == revealed.end()) continue;
    for (auto& ins : it->second) {
      st.add_inscription(ins);
      detail::apply_brc20(st, ins);
    }
  }
  detail::update_offers(st, b);
  return rep;
}

inline void index_blocks(index_state& st, const std::vector<block>& blocks) {
  for (const auto& b : blocks) process_block(st, b);
}

/// Available "cardinal" BTC: outputs owned by `addr` that carry no inscription.
inline std::uint64_t btc_balance(const index_state& st, const std::string& addr) {
  std::uint64_t total = 0;
  for (const auto& [op, e] : st.chain.utxos)
    if (e.out.recipient == addr && !st.holds_inscription(e.ranges)) total += e.out.value;
  return total;
}

inline std::vector<outpoint> cardinal_utxos(const index_state& st, const std::string& addr) {
  std::vector<outpoint> out;
  for (const auto& [op, e] : st.chain.utxos)
    if (e.out.recipient == addr && e.out.value > 0 && !st.holds_inscription(e.ranges)) out.push_back(op);
  return out;
}

// --- snapshot --------------------------------------------------------------

inline json to_json(const inscription& ins) {
  return {{"id", ins.id},
          {"number", ins.number},
          {"content_type", ins.content.content_type},
          {"body", to_hex(ins.content.body)},
          {"genesis_satpoint", to_string(ins.genesis_satpoint)},
          {"genesis_sat", ins.genesis_sat},
          {"height", ins.height},
          {"owner", ins.genesis_owner}};
}

namespace detail {
inline outpoint parse_outpoint(const std::string& s) {
  auto colon = s.find(':');
  if (colon != 64) fail(errc::parse_error, "bad outpoint '" + s + "'");
  auto vout = parse_u64(std::string_view(s).substr(65));
  if (!vout || *vout > UINT32_MAX) fail(errc::parse_error, "bad outpoint '" + s + "'");
  return {hash_from_hex(s.substr(0, 64)), static_cast<std::uint32_t>(*vout)};
}

inline satpoint parse_satpoint(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) fail(errc::parse_error, "bad satpoint '" + s + "'");
  auto off = parse_u64(std::string_view(s).substr(colon + 1));
  if (!off) fail(errc::parse_error, "bad satpoint '" + s + "'");
  return {parse_outpoint(s.substr(0, colon)), *off};
}
}  // namespace detail

inline inscription inscription_from_json(const json& j) {
  inscription ins;
  ins.id = j.at("id").get<std::string>();
  ins.number = j.at("number").get<std::uint64_t>();
  ins.content.content_type = j.at("content_type").get<std::string>();
  ins.content.body = from_hex(j.at("body").get<std::string>());
  ins.genesis_satpoint = detail::parse_satpoint(j.at("genesis_satpoint").get<std::string>());
  ins.genesis_sat = j.at("genesis_sat").get<std::uint64_t>();
  ins.height = j.at("height").get<std::uint64_t>();
  ins.genesis_owner = j.at("owner").get<std::string>();
  return ins;
}

inline json snapshot_json(const index_state& st) {
  const auto& p = st.chain.params;
  json utxos = json::array();
  for (const auto& [op, e] : st.chain.utxos) {
    json ranges = json::array();
    for (const auto& r : e.ranges) ranges.push_back({r.start, r.end});
    utxos.push_back({{"outpoint", to_string(op)},
                     {"value", e.out.value},
                     {"recipient", e.out.recipient},
                     {"script_kind", to_string(e.out.kind)},
                     {"ranges", std::move(ranges)}});
  }
  json spent = json::array();
  for (const auto& op : st.chain.spent) spent.push_back(to_string(op));
  json inscriptions = json::array();
  for (const auto& ins : st.inscriptions) inscriptions.push_back(to_json(ins));
  json diags = json::array();
  for (const auto& d : st.diagnostics) diags.push_back({{"height", d.height}, {"subject", d.subject}, {"message", d.message}});
  return {{"version", 1},
          {"params",
           {{"initial_subsidy", p.initial_subsidy},
            {"halving_interval", p.halving_interval},
            {"difficulty_period", p.difficulty_period},
            {"max_block_weight", p.max_block_weight}}},
          {"tip", st.chain.tip ? json(*st.chain.tip) : json(nullptr)},
          {"utxos", std::move(utxos)},
          {"spent", std::move(spent)},
          {"inscriptions", std::move(inscriptions)},
          {"brc20", brc20::to_json(st.ledger)},
          {"offers", trade::to_json(st.offers)},
          {"diagnostics", std::move(diags)}};
}

inline index_state snapshot_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != 1) fail(errc::parse_error, "unsupported snapshot version");
    const auto& jp = j.at("params");
    index_state st(chain_params{jp.at("initial_subsidy").get<std::uint64_t>(),
                                jp.at("halving_interval").get<std::uint64_t>(),
                                jp.at("difficulty_period").get<std::uint64_t>(),
                                jp.at("max_block_weight").get<std::uint64_t>()});
    if (!j.at("tip").is_null()) st.chain.tip = j.at("tip").get<std::uint64_t>();
    for (const auto& ju : j.at("utxos")) {
      utxo_entry e;
      e.out = {ju.at("value").get<std::uint64_t>(), script_kind_from_string(ju.at("script_kind")),
               ju.at("recipient").get<std::string>()};
      for (const auto& r : ju.at("ranges")) e.ranges.push_back({r.at(0).get<std::uint64_t>(), r.at(1).get<std::uint64_t>()});
      ensure(total_size(e.ranges) == e.out.value, "snapshot utxo ranges do not match its value");
      st.chain.utxos[detail::parse_outpoint(ju.at("outpoint").get<std::string>())] = std::move(e);
    }
    for (const auto& s : j.at("spent")) st.chain.spent.insert(detail::parse_outpoint(s.get<std::string>()));
    for (const auto& ji : j.at("inscriptions")) st.add_inscription(inscription_from_json(ji));
    st.ledger = brc20::ledger_from_json(j.at("brc20"));
    st.offers = trade::offer_book_from_json(j.at("offers"));
    for (const auto& d : j.at("diagnostics"))
      st.diagnostics.push_back(
          {d.at("height").get<std::uint64_t>(), d.at("subject").get<std::string>(), d.at("message").get<std::string>()});
    return st;
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("malformed snapshot: ") + e.what());
  }
}

inline std::string canonical_snapshot(const index_state& st) { return snapshot_json(st).dump(); }

inline hash256 snapshot_hash(const index_state& st) { return sha256(canonical_snapshot(st)); }

}  // namespace ordx
