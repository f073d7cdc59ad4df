#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "ordx/error.hpp"
#include "ordx/inscription.hpp"
#include "ordx/ordinals.hpp"

namespace ordx::brc20 {

using json = nlohmann::json;

inline constexpr unsigned max_decimals = 18;

/// Exact fixed-point token amount, stored as an integer count of 10^-18 units.
struct amount {
  u128 units = 0;

  static constexpr u128 scale() {
    u128 s = 1;
    for (unsigned i = 0; i < max_decimals; ++i) s *= 10;
    return s;
  }
  static constexpr amount whole(std::uint64_t n) { return {static_cast<u128>(n) * scale()}; }

  constexpr bool is_zero() const { return units == 0; }
  constexpr amount& operator+=(amount o) {
    units += o.units;
    return *this;
  }
  constexpr amount& operator-=(amount o) {
    units -= o.units;
    return *this;
  }
  friend constexpr amount operator+(amount a, amount b) { return a += b; }
  friend constexpr amount operator-(amount a, amount b) { return a -= b; }
  auto operator<=>(const amount&) const = default;
};

/// Decimal digits with at most one '.', 1..18 fractional digits, strictly positive.
inline amount parse_amount(std::string_view s) {
  auto bad = [&](const char* why) -> amount { fail(errc::bad_amount, "'" + std::string(s) + "': " + why); };
  if (s.empty()) return bad("empty");
  auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty()) return bad("missing integer part");
  if (dot != std::string_view::npos && frac.empty()) return bad("missing fractional digits");
  if (frac.size() > max_decimals) return bad("more than 18 decimals");
  constexpr u128 max = ~static_cast<u128>(0);
  u128 v = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return bad("not a decimal number");
    const unsigned d = static_cast<unsigned>(c - '0');
    if (v > (max - d) / 10) return bad("too large");
    v = v * 10 + d;
  }
  for (char c : frac)
    if (c < '0' || c > '9') return bad("not a decimal number");
  if (v > max / amount::scale()) return bad("too large");
  v *= amount::scale();
  u128 place = amount::scale();
  for (char c : frac) {
    place /= 10;
    v += place * static_cast<unsigned>(c - '0');
  }
  if (v == 0) return bad("must be positive");
  return {v};
}

inline std::string to_string(amount a) {
  std::string whole = ordx::detail::u128_to_string(a.units / amount::scale());
  u128 frac = a.units % amount::scale();
  if (frac == 0) return whole;
  std::string f = ordx::detail::u128_to_string(frac);
  f.insert(0, max_decimals - f.size(), '0');
  while (f.back() == '0') f.pop_back();
  return whole + "." + f;
}

/// Lowercases ASCII letters; the result must be exactly four bytes.
inline std::string normalize_tick(std::string_view raw) {
  std::string t(raw);
  for (auto& c : t)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (t.size() != 4) fail(errc::bad_tick, "tick '" + std::string(raw) + "' is not 4 bytes");
  return t;
}

struct deploy_op {
  std::string tick;
  amount max;
  amount lim;
  bool operator==(const deploy_op&) const = default;
};

struct mint_op {
  std::string tick;
  amount amt;
  bool operator==(const mint_op&) const = default;
};

struct transfer_op {
  std::string tick;
  amount amt;
  bool operator==(const transfer_op&) const = default;
};

using operation = std::variant<deploy_op, mint_op, transfer_op>;

namespace detail {
inline const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(errc::missing_field, std::string("missing \"") + key + "\"");
  return *it;
}

inline std::string string_field(const json& j, const char* key, errc bad) {
  const auto& v = field(j, key);
  if (!v.is_string()) fail(bad, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

inline amount amount_field(const json& j, const char* key) {
  return parse_amount(string_field(j, key, errc::bad_amount));
}
}  // namespace detail

inline operation parse(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(errc::not_json, "body is not a JSON object");
  if (detail::string_field(j, "p", errc::wrong_protocol) != "brc-20") fail(errc::wrong_protocol, "p is not brc-20");
  const auto op = detail::string_field(j, "op", errc::unknown_op);
  if (op != "deploy" && op != "mint" && op != "transfer") fail(errc::unknown_op, "op '" + op + "'");
  const auto tick = normalize_tick(detail::string_field(j, "tick", errc::bad_tick));
  if (op == "deploy") {
    deploy_op d{tick, detail::amount_field(j, "max"), detail::amount_field(j, "lim")};
    if (d.lim > d.max) fail(errc::lim_exceeds_max, "lim " + to_string(d.lim) + " exceeds max " + to_string(d.max));
    return d;
  }
  if (op == "mint") return mint_op{tick, detail::amount_field(j, "amt")};
  return transfer_op{tick, detail::amount_field(j, "amt")};
}

inline operation parse(const envelope& env) { return parse(body_string(env)); }

inline std::string to_body(const operation& op) {
  json j{{"p", "brc-20"}};
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        j["tick"] = o.tick;
        if constexpr (std::is_same_v<T, deploy_op>) {
          j["op"] = "deploy";
          j["max"] = to_string(o.max);
          j["lim"] = to_string(o.lim);
        } else {
          j["op"] = std::is_same_v<T, mint_op> ? "mint" : "transfer";
          j["amt"] = to_string(o.amt);
        }
      },
      op);
  return j.dump();
}

enum class kind { brc20_deploy, brc20_mint, brc20_transfer, text, file, other };

constexpr std::string_view to_string(kind k) {
  switch (k) {
    case kind::brc20_deploy: return "brc20_deploy";
    case kind::brc20_mint: return "brc20_mint";
    case kind::brc20_transfer: return "brc20_transfer";
    case kind::text: return "text";
    case kind::file: return "file";
    case kind::other: return "other";
  }
  return "other";
}

/// True when the body is a JSON object claiming the brc-20 protocol,
/// whether or not the rest of it is valid.
inline bool claims_brc20(const envelope& env) {
  json j = json::parse(body_string(env), nullptr, false);
  return !j.is_discarded() && j.is_object() && j.contains("p") && j["p"] == "brc-20";
}

inline kind classify(const envelope& env) {
  try {
    auto op = parse(env);
    if (std::holds_alternative<deploy_op>(op)) return kind::brc20_deploy;
    if (std::holds_alternative<mint_op>(op)) return kind::brc20_mint;
    return kind::brc20_transfer;
  } catch (const error&) {
  }
  if (claims_brc20(env)) return kind::other;
  if (env.content_type.starts_with("text/")) return kind::text;
  if (!env.content_type.empty()) return kind::file;
  return kind::other;
}

// --- ledger ----------------------------------------------------------------

struct tick_state {
  std::string tick;
  amount max;
  amount lim;
  amount minted;
  std::string deploy_id;
  std::uint64_t deploy_height = 0;
  bool operator==(const tick_state&) const = default;
};

struct pending_transfer {
  std::string tick;
  amount amt;
  std::string owner;
  bool used = false;
  bool operator==(const pending_transfer&) const = default;
};

/// Off-chain token state. `available` excludes amounts earmarked by unused
/// transfer inscriptions; those live in `pendings` until settled.
struct ledger {
  std::map<std::string, tick_state> ticks;
  std::map<std::string, std::map<std::string, amount>> available;  // tick -> address -> amount
  std::map<std::string, pending_transfer> pendings;                // inscription id -> transfer

  bool operator==(const ledger&) const = default;
};

namespace detail {
inline void credit(ledger& l, const std::string& tick, const std::string& addr, amount a) {
  if (!a.is_zero()) l.available[tick][addr] += a;
}

inline void debit(ledger& l, const std::string& tick, const std::string& addr, amount a) {
  auto& book = l.available[tick];
  auto it = book.find(addr);
  ensure(it != book.end() && it->second >= a, "debit below zero for " + addr);
  it->second -= a;
  if (it->second.is_zero()) book.erase(it);
  if (book.empty()) l.available.erase(tick);
}

inline const tick_state& require_tick(const ledger& l, const std::string& tick) {
  auto it = l.ticks.find(tick);
  if (it == l.ticks.end()) fail(errc::unknown_tick, "tick '" + tick + "' was never deployed");
  return it->second;
}
}  // namespace detail

inline void apply_deploy(ledger& l, const deploy_op& op, const std::string& inscription_id, std::uint64_t height) {
  if (op.lim > op.max) fail(errc::lim_exceeds_max, "lim exceeds max");
  if (l.ticks.count(op.tick)) fail(errc::tick_exists, "tick '" + op.tick + "' already deployed");
  l.ticks[op.tick] = tick_state{op.tick, op.max, op.lim, {}, inscription_id, height};
}

inline void apply_mint(ledger& l, const mint_op& op, const std::string& minter) {
  const auto& t = detail::require_tick(l, op.tick);
  if (op.amt > t.lim) fail(errc::exceeds_lim, "mint of " + to_string(op.amt) + " exceeds lim " + to_string(t.lim));
  if (op.amt > t.max - t.minted)
    fail(errc::exceeds_max, "mint of " + to_string(op.amt) + " would push supply past max " + to_string(t.max));
  l.ticks[op.tick].minted += op.amt;
  detail::credit(l, op.tick, minter, op.amt);
}

inline void inscribe_transfer(ledger& l, const transfer_op& op, const std::string& inscription_id,
                              const std::string& owner) {
  detail::require_tick(l, op.tick);
  ensure(!l.pendings.count(inscription_id), "duplicate transfer inscription " + inscription_id);
  amount have;
  if (auto t = l.available.find(op.tick); t != l.available.end())
    if (auto a = t->second.find(owner); a != t->second.end()) have = a->second;
  if (have < op.amt)
    fail(errc::insufficient_balance,
         owner + " has " + to_string(have) + " " + op.tick + " available, needs " + to_string(op.amt));
  detail::debit(l, op.tick, owner, op.amt);
  l.pendings[inscription_id] = pending_transfer{op.tick, op.amt, owner, false};
}

inline void settle_transfer(ledger& l, const std::string& inscription_id, const std::string& sender,
                            const std::string& receiver) {
  auto it = l.pendings.find(inscription_id);
  if (it == l.pendings.end()) fail(errc::unknown_pending, "no transfer inscription " + inscription_id);
  auto& p = it->second;
  if (p.used) fail(errc::already_used, "transfer inscription " + inscription_id + " was already used");
  if (p.owner != sender) fail(errc::not_owner, sender + " does not own transfer inscription " + inscription_id);
  p.used = true;
  detail::credit(l, p.tick, receiver, p.amt);
}

struct balance {
  amount available;
  amount pending;
  bool operator==(const balance&) const = default;
};

inline balance query_balance(const ledger& l, const std::string& tick, const std::string& addr) {
  balance b;
  if (auto t = l.available.find(tick); t != l.available.end())
    if (auto a = t->second.find(addr); a != t->second.end()) b.available = a->second;
  for (const auto& [id, p] : l.pendings)
    if (!p.used && p.tick == tick && p.owner == addr) b.pending += p.amt;
  return b;
}

inline const tick_state& query_tick(const ledger& l, const std::string& tick) {
  return detail::require_tick(l, normalize_tick(tick));
}

/// Supply conservation and non-negativity; throws invariant_violation.
inline void check_invariants(const ledger& l) {
  std::map<std::string, amount> held;
  for (const auto& [tick, book] : l.available) {
    ensure(l.ticks.count(tick), "balance for undeployed tick " + tick);
    for (const auto& [addr, a] : book) {
      ensure(!a.is_zero(), "zero balance entry stored");
      held[tick] += a;
    }
  }
  for (const auto& [id, p] : l.pendings)
    if (!p.used) held[p.tick] += p.amt;
  for (const auto& [tick, t] : l.ticks) {
    ensure(t.lim <= t.max && t.minted <= t.max, "tick " + tick + " exceeds its max");
    ensure(held[tick] == t.minted, "tick " + tick + ": held " + to_string(held[tick]) + " != minted " +
                                       to_string(t.minted));
  }
}

// --- canonical JSON --------------------------------------------------------

inline json to_json(const ledger& l) {
  json ticks = json::object();
  for (const auto& [tick, t] : l.ticks)
    ticks[tick] = {{"max", to_string(t.max)},
                   {"lim", to_string(t.lim)},
                   {"minted", to_string(t.minted)},
                   {"deploy_id", t.deploy_id},
                   {"height", t.deploy_height}};
  json balances = json::object();
  for (const auto& [tick, book] : l.available)
    for (const auto& [addr, a] : book) balances[tick][addr] = to_string(a);
  json pendings = json::array();
  for (const auto& [id, p] : l.pendings)
    pendings.push_back({{"id", id}, {"tick", p.tick}, {"amt", to_string(p.amt)}, {"owner", p.owner}, {"used", p.used}});
  return {{"ticks", std::move(ticks)}, {"balances", std::move(balances)}, {"pendings", std::move(pendings)}};
}

inline amount amount_from_json(const json& j) {
  const auto s = j.get<std::string>();
  return s == "0" ? amount{} : parse_amount(s);
}

inline ledger ledger_from_json(const json& j) {
  ledger l;
  for (const auto& [tick, t] : j.at("ticks").items())
    l.ticks[tick] = tick_state{tick,
                               amount_from_json(t.at("max")),
                               amount_from_json(t.at("lim")),
                               amount_from_json(t.at("minted")),
                               t.at("deploy_id").get<std::string>(),
                               t.at("height").get<std::uint64_t>()};
  for (const auto& [tick, book] : j.at("balances").items())
    for (const auto& [addr, a] : book.items()) l.available[tick][addr] = amount_from_json(a);
  for (const auto& p : j.at("pendings"))
    l.pendings[p.at("id").get<std::string>()] =
        pending_transfer{p.at("tick").get<std::string>(), amount_from_json(p.at("amt")),
                         p.at("owner").get<std::string>(), p.at("used").get<bool>()};
  return l;
}

/// Token-level view independent of inscription ids and heights:
/// {ticks:{tick:{max,lim,minted}}, balances:{tick:{addr:{available,pending}}}}.
inline json balances_view(const ledger& l) {
  json ticks = json::object();
  for (const auto& [tick, t] : l.ticks)
    ticks[tick] = {{"max", to_string(t.max)}, {"lim", to_string(t.lim)}, {"minted", to_string(t.minted)}};
  std::map<std::string, std::map<std::string, balance>> rows;
  for (const auto& [tick, book] : l.available)
    for (const auto& [addr, a] : book) rows[tick][addr].available += a;
  for (const auto& [id, p] : l.pendings)
    if (!p.used) rows[p.tick][p.owner].pending += p.amt;
  json balances = json::object();
  for (const auto& [tick, book] : rows)
    for (const auto& [addr, b] : book)
      balances[tick][addr] = {{"available", to_string(b.available)}, {"pending", to_string(b.pending)}};
  return {{"ticks", std::move(ticks)}, {"balances", std::move(balances)}};
}

}  // namespace ordx::brc20
