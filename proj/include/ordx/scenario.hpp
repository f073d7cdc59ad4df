#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ordx/brc20.hpp"
#include "ordx/indexer.hpp"
#include "ordx/inscription.hpp"
#include "ordx/trade.hpp"

// Scenario scripts: a JSON list of actions compiled into a valid chain.
//
//   {"action":"mine", "to":A, "count":N}
//   {"action":"deploy", "by":A, "tick":T, "max":M, "lim":L}
//   {"action":"mint", "by":A, "tick":T, "amt":X}
//   {"action":"transfer_inscribe", "by":A, "tick":T, "amt":X, "label":K}
//   {"action":"transfer_send", "from":A, "to":B, "label":K}
//   {"action":"trade_offer", "seller":A, "label":K, "ask":S}
//   {"action":"trade_accept", "buyer":B, "label":K, "fee":F}
//   {"action":"inscribe", "by":A, "content_type":C, "body":S}
//
// Token fields are copied verbatim into the inscription body, so protocol
// errors surface when the chain is indexed, not here.

namespace ordx::scenario {

using json = nlohmann::json;

struct options {
  std::string miner = "miner";
  std::uint64_t fee = trade::default_fee;
  std::uint64_t postage = 546;
};

struct compiled {
  std::vector<block> blocks;
  index_state state;  // state after indexing every emitted block
};

namespace detail {

class compiler {
 public:
  explicit compiler(options opt) : opt_(std::move(opt)) {}

  compiled run(const json& script) {
    if (!script.is_array()) fail(errc::action_invalid, "scenario script must be a JSON list");
    if (!script.empty()) emit(trade::next_block(out_.state, {}, opt_.miner));
    for (std::size_t i = 0; i < script.size(); ++i) {
      index_ = i;
      try {
        step(script[i]);
      } catch (const error& e) {
        if (e.code() == errc::action_invalid) throw;
        fail(errc::action_invalid, "action " + std::to_string(i) + ": " + e.what());
      } catch (const json::exception& e) {
        fail(errc::action_invalid, "action " + std::to_string(i) + ": " + e.what());
      }
    }
    return std::move(out_);
  }

 private:
  [[noreturn]] void invalid(const std::string& why) const {
    fail(errc::action_invalid, "action " + std::to_string(index_) + ": " + why);
  }

  static std::string str(const json& a, const char* key) {
    if (!a.contains(key) || !a[key].is_string()) fail(errc::action_invalid, std::string("missing \"") + key + "\"");
    return a[key].get<std::string>();
  }

  void emit(const block& b) {
    process_block(out_.state, b);
    out_.blocks.push_back(b);
  }

  // A miner output able to cover `need` sats.
  outpoint miner_funds(std::uint64_t need) const {
    for (const auto& op : cardinal_utxos(out_.state, opt_.miner))
      if (out_.state.chain.utxos.at(op).out.value >= need) return op;
    invalid("miner has no output worth " + std::to_string(need) + " sats");
  }

  void reveal(const std::string& owner, const std::string& content_type, const std::string& body,
              const std::string& label) {
    const auto need = opt_.postage + opt_.fee;
    const auto src = miner_funds(need);
    const auto value = out_.state.chain.utxos.at(src).out.value;
    transaction tx;
    tx.inputs.push_back({src, build_envelope(content_type, body)});
    tx.outputs.push_back({opt_.postage, script_kind::p2tr_inscription, owner});
    tx.outputs.push_back({value - need, script_kind::plain, opt_.miner});
    tx.txid = compute_txid(tx);
    if (!label.empty()) {
      if (labels_.count(label)) invalid("label '" + label + "' reused");
      labels_[label] = inscription_id(tx.txid, 0);
    }
    emit(trade::next_block(out_.state, {tx}, opt_.miner));
  }

  const std::string& label_id(const json& a) const {
    auto it = labels_.find(str(a, "label"));
    if (it == labels_.end()) invalid("unknown label '" + str(a, "label") + "'");
    return it->second;
  }

  static std::string token_body(const json& a, const char* op, std::initializer_list<const char*> fields) {
    json j{{"p", "brc-20"}, {"op", op}};
    for (const char* f : fields)
      if (a.contains(f)) j[f] = a[f];
    return j.dump();
  }

  void step(const json& a) {
    const auto action = str(a, "action");
    if (action == "mine") {
      const auto to = a.value("to", opt_.miner);
      const auto count = a.value("count", std::uint64_t{1});
      for (std::uint64_t k = 0; k < count; ++k) emit(trade::next_block(out_.state, {}, to));
    } else if (action == "deploy") {
      reveal(str(a, "by"), "text/plain;charset=utf-8", token_body(a, "deploy", {"tick", "max", "lim"}), "");
    } else if (action == "mint") {
      reveal(str(a, "by"), "text/plain;charset=utf-8", token_body(a, "mint", {"tick", "amt"}), "");
    } else if (action == "transfer_inscribe") {
      reveal(str(a, "by"), "text/plain;charset=utf-8", token_body(a, "transfer", {"tick", "amt"}),
             a.value("label", std::string{}));
    } else if (action == "inscribe") {
      reveal(str(a, "by"), a.value("content_type", std::string("text/plain;charset=utf-8")), str(a, "body"),
             a.value("label", std::string{}));
    } else if (action == "transfer_send") {
      send(str(a, "from"), str(a, "to"), label_id(a));
    } else if (action == "trade_offer") {
      if (!a.contains("ask") || !a["ask"].is_number_unsigned()) invalid("missing ask");
      trade::create_offer(out_.state, str(a, "seller"), label_id(a), a["ask"].get<std::uint64_t>());
    } else if (action == "trade_accept") {
      const auto* o = trade::offer_for(out_.state, label_id(a));
      if (!o) invalid("no open offer for label '" + str(a, "label") + "'");
      const auto offer_id = o->id;
      trade::accept_offer(out_.state, offer_id, str(a, "buyer"), {}, a.value("fee", opt_.fee));
      auto s = trade::broadcast_and_settle(out_.state, offer_id, opt_.miner);
      out_.blocks.push_back(s.block);
    } else {
      invalid("unknown action '" + action + "'");
    }
  }

  // Forwards the inscribed sat to `to`; the miner pays the fee.
  void send(const std::string& from, const std::string& to, const std::string& id) {
    const auto* ins = out_.state.find_inscription(id);
    if (!ins) invalid("inscription " + id + " was never revealed");
    auto where = sat_index(out_.state.chain.utxos).find(ins->genesis_sat);
    if (!where) invalid("inscription " + id + " is no longer in an unspent output");
    const auto& held = out_.state.chain.utxos.at(where->outpoint);
    if (held.out.recipient != from) invalid(from + " does not hold inscription " + id);
    if (where->offset != 0) invalid("inscribed sat is not first in its output");
    const auto src = miner_funds(opt_.fee);
    const auto funds = out_.state.chain.utxos.at(src).out.value;
    transaction tx;
    tx.inputs.push_back({where->outpoint, {}});
    tx.inputs.push_back({src, {}});
    tx.outputs.push_back({held.out.value, script_kind::p2tr_inscription, to});
    tx.outputs.push_back({funds - opt_.fee, script_kind::plain, opt_.miner});
    tx.txid = compute_txid(tx);
    emit(trade::next_block(out_.state, {tx}, opt_.miner));
  }

  options opt_;
  compiled out_;
  std::map<std::string, std::string> labels_;
  std::size_t index_ = 0;
};

}  // namespace detail

/// Compiles `script` into blocks starting at height 0. An empty script yields no blocks.
inline compiled compile(const json& script, const options& opt = {}) { return detail::compiler(opt).run(script); }

/// Random BRC-20 event script over at most `ticks` token symbols and
/// `addresses` parties. Includes protocol-invalid events on purpose.
inline json random_script(std::uint64_t seed, std::size_t events, std::size_t ticks = 5, std::size_t addresses = 8) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  const std::vector<std::string> tick_pool{"ordi", "sats", "MOON", "oshi", "piza", "rats", "bad"};
  std::vector<std::string> tick_names;
  for (std::size_t i = 0; i < ticks && i < 5; ++i) tick_names.push_back(tick_pool[i]);
  if (chance(0.2)) tick_names.push_back("bad");  // wrong length, always rejected
  std::vector<std::string> addrs;
  for (std::size_t i = 0; i < addresses; ++i) addrs.push_back("addr" + std::to_string(i));

  auto random_amount = [&](std::uint64_t scale) {
    const auto whole = std::uniform_int_distribution<std::uint64_t>(0, scale)(rng);
    if (chance(0.15)) return std::to_string(whole) + "." + std::to_string(pick(99) + 1);
    return std::to_string(whole == 0 && chance(0.5) ? 1 : whole);
  };

  struct live_transfer {
    std::string label;
    std::string holder;
  };
  std::vector<live_transfer> transfers;
  json script = json::array();
  for (std::size_t e = 0; e < events; ++e) {
    const auto roll = pick(100);
    const auto& tick = tick_names[pick(tick_names.size())];
    const auto& who = addrs[pick(addrs.size())];
    if (roll < 12) {
      script.push_back({{"action", "deploy"}, {"by", who}, {"tick", tick}, {"max", random_amount(5000)},
                        {"lim", random_amount(1500)}});
    } else if (roll < 55) {
      script.push_back({{"action", "mint"}, {"by", who}, {"tick", tick}, {"amt", random_amount(1200)}});
    } else if (roll < 78 || transfers.empty()) {
      const auto label = "t" + std::to_string(e);
      script.push_back(
          {{"action", "transfer_inscribe"}, {"by", who}, {"tick", tick}, {"amt", random_amount(800)}, {"label", label}});
      transfers.push_back({label, who});
    } else {
      auto& t = transfers[pick(transfers.size())];
      const auto& to = addrs[pick(addrs.size())];
      script.push_back({{"action", "transfer_send"}, {"from", t.holder}, {"to", to}, {"label", t.label}});
      t.holder = to;
    }
  }
  return script;
}

}  // namespace ordx::scenario
