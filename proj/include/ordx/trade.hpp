#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ordx/indexer.hpp"
#include "ordx/psbt.hpp"

// Offer lifecycle for selling a BRC-20 transfer inscription for BTC:
// create (seller signs) -> accept (buyer funds and signs) -> broadcast.
// The token side settles when the indexer sees the inscribed sat arrive at
// the buyer's output.

namespace ordx::trade {

inline constexpr std::uint64_t default_fee = 10'000;

/// Coinbase paying `outputs`. Its txid is derived from the height so that
/// identical payouts in different blocks stay distinct.
inline transaction make_coinbase(std::uint64_t height, std::vector<tx_out> outputs) {
  transaction cb;
  cb.is_coinbase = true;
  cb.outputs = std::move(outputs);
  json j = to_json(cb, false);
  j.erase("txid");
  cb.txid = sha256("coinbase:" + std::to_string(height) + ":" + j.dump());
  return cb;
}

/// Block at the next height: `txs` plus a coinbase paying subsidy and fees to `miner`.
inline block next_block(const index_state& st, std::vector<transaction> txs, const std::string& miner) {
  const auto height = st.chain.next_height();
  std::uint64_t fees = 0;
  utxo_set local;
  for (const auto& tx : txs) {
    std::uint64_t in = 0;
    for (const auto& i : tx.inputs) {
      if (auto it = st.chain.utxos.find(i.prevout); it != st.chain.utxos.end())
        in += it->second.out.value;
      else if (auto l = local.find(i.prevout); l != local.end())
        in += l->second.out.value;
      else
        fail(errc::missing_prevout, to_string(i.prevout));
    }
    const auto out = output_value(tx);
    if (in < out) fail(errc::negative_fee, "tx " + to_hex(tx.txid));
    fees += in - out;
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) local[{tx.txid, v}] = {tx.outputs[v], {}};
  }
  block b;
  b.height = height;
  b.txs.push_back(make_coinbase(height, {{st.chain.params.subsidy(height) + fees, script_kind::plain, miner}}));
  for (auto& tx : txs) b.txs.push_back(std::move(tx));
  return b;
}

inline offer& require_offer(index_state& st, const std::string& offer_id) {
  auto it = st.offers.offers.find(offer_id);
  if (it == st.offers.offers.end()) fail(errc::unknown_offer, "no offer " + offer_id);
  return it->second;
}

/// Live offer for an inscription, if any.
inline const offer* offer_for(const index_state& st, const std::string& inscription_id) {
  for (const auto& [id, o] : st.offers.offers)
    if (o.inscription_id == inscription_id && o.live()) return &o;
  return nullptr;
}

/// Seller lists an unused transfer inscription for `ask` sats. A newer offer
/// on the same inscription cancels the older one.
inline offer create_offer(index_state& st, const std::string& seller, const std::string& inscription_id,
                          std::uint64_t ask) {
  if (ask == 0) fail(errc::bad_ask, "ask must be positive");
  auto p = st.ledger.pendings.find(inscription_id);
  if (p == st.ledger.pendings.end())
    fail(errc::not_pending_transfer, inscription_id + " is not a transfer inscription");
  if (p->second.used) fail(errc::already_used, "transfer inscription " + inscription_id + " was already used");
  if (p->second.owner != seller) fail(errc::not_owner, seller + " does not own " + inscription_id);
  const auto* ins = st.find_inscription(inscription_id);
  ensure(ins != nullptr, "pending transfer without inscription " + inscription_id);
  auto where = sat_index(st.chain.utxos).find(ins->genesis_sat);
  if (!where) fail(errc::not_pending_transfer, "inscribed sat of " + inscription_id + " is not unspent");
  const auto& utxo = st.chain.utxos.at(where->outpoint);
  if (utxo.out.recipient != seller) fail(errc::not_owner, seller + " does not hold the inscribed sat");

  for (auto& [id, o] : st.offers.offers)
    if (o.inscription_id == inscription_id && o.live()) o.status = offer_status::cancelled;

  offer o;
  o.id = "offer-" + std::to_string(st.offers.next_id++);
  o.seller = seller;
  o.inscription_id = inscription_id;
  o.ask = ask;
  o.psbt.inputs.push_back({where->outpoint, utxo.out.value, seller, inscription_id, {}});
  o.psbt.outputs.push_back({ask, script_kind::plain, seller});
  sign(o.psbt, 0, seller, sighash::input_and_output, 0);
  st.offers.offers[o.id] = o;
  return o;
}

/// Buyer completes the offer: its funding inputs and a change output are
/// appended, the inscribed sat is routed to the buyer by placing the buyer's
/// output first. `funding` empty selects the buyer's cardinal outputs.
inline psbt accept_offer(index_state& st, const std::string& offer_id, const std::string& buyer,
                         std::vector<outpoint> funding = {}, std::uint64_t fee = default_fee) {
  auto& o = require_offer(st, offer_id);
  if (o.status != offer_status::open) fail(errc::offer_not_open, offer_id + " is " + to_string(o.status));
  const std::uint64_t need = o.ask + fee;
  std::uint64_t have = 0;
  if (funding.empty()) {
    for (const auto& op : cardinal_utxos(st, buyer)) {
      if (have >= need) break;
      funding.push_back(op);
      have += st.chain.utxos.at(op).out.value;
    }
  } else {
    for (const auto& op : funding) {
      auto it = st.chain.utxos.find(op);
      if (it == st.chain.utxos.end()) fail(errc::missing_prevout, to_string(op));
      if (it->second.out.recipient != buyer) fail(errc::not_owner, buyer + " does not own " + to_string(op));
      have += it->second.out.value;
    }
  }
  if (have < need)
    fail(errc::insufficient_funds, buyer + " funds " + std::to_string(have) + " of " + std::to_string(need));

  const auto& seller_in = o.psbt.inputs.front();
  psbt full;
  full.inputs.push_back(seller_in);
  for (const auto& op : funding) full.inputs.push_back({op, st.chain.utxos.at(op).out.value, buyer, std::nullopt, {}});
  full.outputs.push_back({seller_in.value, script_kind::p2tr_inscription, buyer});
  full.outputs.insert(full.outputs.end(), o.psbt.outputs.begin(), o.psbt.outputs.end());
  if (have > need) full.outputs.push_back({have - need, script_kind::plain, buyer});

  psbt buyer_copy = full;
  for (auto& in : buyer_copy.inputs) in.signatures.clear();
  for (std::size_t i = 1; i < buyer_copy.inputs.size(); ++i) sign(buyer_copy, i, buyer, sighash::all);
  psbt combined = combine(full, buyer_copy);
  finalize(combined);

  o.psbt = combined;
  o.status = offer_status::accepted;
  o.buyer = buyer;
  o.fee = fee;
  o.settlement_txid = extract_transaction(combined).txid;
  return combined;
}

struct settlement {
  transaction tx;
  ordx::block block;
  std::string tick;
  brc20::amount tokens;
  std::int64_t seller_btc_delta = 0;
  std::int64_t buyer_btc_delta = 0;
  std::uint64_t fee = 0;
};

/// Verifies and broadcasts an accepted offer in the next block. Nothing
/// changes if a signature fails or any input has already been spent.
inline settlement broadcast_and_settle(index_state& st, const std::string& offer_id,
                                       const std::string& miner = "miner") {
  auto& o = require_offer(st, offer_id);
  if (o.status == offer_status::stale) fail(errc::double_spend, offer_id + " is stale: an input was spent elsewhere");
  if (o.status != offer_status::accepted) fail(errc::offer_not_open, offer_id + " is " + to_string(o.status));
  if (!o.psbt.finalized || !fully_signed(o.psbt)) fail(errc::signature_invalid, offer_id + " has invalid signatures");
  auto tx = extract_transaction(o.psbt);
  if (!o.settlement_txid || tx.txid != *o.settlement_txid)
    fail(errc::signature_invalid, offer_id + " was modified after acceptance");
  for (const auto& in : o.psbt.inputs)
    if (!st.chain.utxos.count(in.prevout)) fail(errc::double_spend, to_string(in.prevout) + " is already spent");

  settlement s;
  const auto& pending = st.ledger.pendings.at(o.inscription_id);
  s.tick = pending.tick;
  s.tokens = pending.amt;
  const auto seller = o.seller, buyer = o.buyer;
  const auto seller_before = static_cast<std::int64_t>(btc_balance(st, seller));
  const auto buyer_before = static_cast<std::int64_t>(btc_balance(st, buyer));

  s.tx = tx;
  s.block = next_block(st, {tx}, miner);
  auto rep = process_block(st, s.block);
  s.fee = rep.tx_fees.at(1);
  s.seller_btc_delta = static_cast<std::int64_t>(btc_balance(st, seller)) - seller_before;
  s.buyer_btc_delta = static_cast<std::int64_t>(btc_balance(st, buyer)) - buyer_before;
  return s;
}

}  // namespace ordx::trade
