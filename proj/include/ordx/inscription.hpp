#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ordx/chain_types.hpp"
#include "ordx/error.hpp"
#include "ordx/ordinals.hpp"

// Inscription envelope codec. Each witness item is exactly one token:
//   0x00                    OP_FALSE / OP_0
//   0x63                    OP_IF
//   0x68                    OP_ENDIF
//   0x51                    OP_1
//   0x4c len_lo len_hi data PUSH(data), len <= 520
// Anything else is opaque (signatures, control blocks) and never part of an envelope.

namespace ordx {

namespace op {
inline constexpr std::uint8_t false_ = 0x00;
inline constexpr std::uint8_t if_ = 0x63;
inline constexpr std::uint8_t endif = 0x68;
inline constexpr std::uint8_t one = 0x51;
inline constexpr std::uint8_t push = 0x4c;
}  // namespace op

inline constexpr std::size_t max_push_size = 520;
inline constexpr std::size_t max_envelope_size = 4'000'000;
inline constexpr std::string_view envelope_tag = "ord";

struct envelope {
  std::string content_type;
  bytes body;

  bool operator==(const envelope&) const = default;
};

inline std::string body_string(const envelope& e) { return {e.body.begin(), e.body.end()}; }

enum class token_kind { op_false, op_if, op_endif, op_1, push, opaque };

struct script_token {
  token_kind kind = token_kind::opaque;
  bytes data;  // push payload only
  bool malformed_push = false;
};

inline script_token decode_token(const bytes& item) {
  if (item.size() == 1) {
    switch (item[0]) {
      case op::false_: return {token_kind::op_false, {}};
      case op::if_: return {token_kind::op_if, {}};
      case op::endif: return {token_kind::op_endif, {}};
      case op::one: return {token_kind::op_1, {}};
      default: break;
    }
  }
  if (!item.empty() && item[0] == op::push) {
    script_token t{token_kind::push, {}};
    if (item.size() < 3) {
      t.malformed_push = true;
      return t;
    }
    const std::size_t len = item[1] | (static_cast<std::size_t>(item[2]) << 8);
    if (len > max_push_size || item.size() != 3 + len) {
      t.malformed_push = true;
      return t;
    }
    t.data.assign(item.begin() + 3, item.end());
    return t;
  }
  return {token_kind::opaque, {}};
}

inline bytes encode_push(std::span<const std::uint8_t> data) {
  ensure(data.size() <= max_push_size, "push exceeds 520 bytes");
  bytes item(3 + data.size());
  item[0] = op::push;
  item[1] = static_cast<std::uint8_t>(data.size() & 0xff);
  item[2] = static_cast<std::uint8_t>(data.size() >> 8);
  std::copy(data.begin(), data.end(), item.begin() + 3);
  return item;
}

inline bool printable_ascii(std::string_view s) {
  for (unsigned char c : s)
    if (c < 0x20 || c > 0x7e) return false;
  return true;
}

/// Finds the first OP_FALSE OP_IF PUSH("ord") sequence and decodes the
/// envelope that follows. Returns nullopt when no such tag is present.
inline std::optional<envelope> parse_envelope(const std::vector<bytes>& witness) {
  std::vector<script_token> toks;
  toks.reserve(witness.size());
  for (const auto& item : witness) toks.push_back(decode_token(item));

  auto is_tag = [&](std::size_t i) {
    return i + 2 < toks.size() && toks[i].kind == token_kind::op_false && toks[i + 1].kind == token_kind::op_if &&
           toks[i + 2].kind == token_kind::push && !toks[i + 2].malformed_push &&
           std::string_view(reinterpret_cast<const char*>(toks[i + 2].data.data()), toks[i + 2].data.size()) ==
               envelope_tag;
  };
  std::size_t i = 0;
  while (i < toks.size() && !is_tag(i)) ++i;
  if (i == toks.size()) return std::nullopt;
  i += 3;

  auto at_end = [&] { return i >= toks.size(); };
  auto expect = [&](token_kind k, const char* what) {
    if (at_end()) fail(errc::unbalanced_if, std::string("envelope ends before ") + what);
    if (toks[i].kind == token_kind::push && toks[i].malformed_push) fail(errc::malformed_envelope, "malformed push");
    if (toks[i].kind != k) fail(errc::malformed_envelope, std::string("expected ") + what);
    return std::move(toks[i++]);
  };

  envelope env;
  expect(token_kind::op_1, "OP_1");
  auto ct = expect(token_kind::push, "content-type push");
  env.content_type.assign(ct.data.begin(), ct.data.end());
  if (!printable_ascii(env.content_type)) fail(errc::malformed_envelope, "content type is not printable ASCII");
  expect(token_kind::op_false, "OP_0");
  while (!at_end() && toks[i].kind == token_kind::push) {
    if (toks[i].malformed_push) fail(errc::malformed_envelope, "malformed body push");
    env.body.insert(env.body.end(), toks[i].data.begin(), toks[i].data.end());
    ++i;
  }
  expect(token_kind::op_endif, "OP_ENDIF");
  return env;
}

/// Emits the envelope as witness items; the body is split into 520-byte pushes.
inline std::vector<bytes> build_envelope(std::string_view content_type, std::span<const std::uint8_t> body) {
  if (!printable_ascii(content_type)) fail(errc::invalid_content_type, "content type must be printable ASCII");
  if (content_type.size() > max_push_size) fail(errc::invalid_content_type, "content type exceeds one push");
  const std::size_t pushes = body.empty() ? 1 : (body.size() + max_push_size - 1) / max_push_size;
  const std::size_t encoded =
      2 + (3 + envelope_tag.size()) + 1 + (3 + content_type.size()) + 1 + pushes * 3 + body.size() + 1;
  if (encoded > max_envelope_size)
    fail(errc::body_too_large, "envelope of " + std::to_string(encoded) + " bytes exceeds the block weight cap");

  std::vector<bytes> w;
  w.push_back({op::false_});
  w.push_back({op::if_});
  w.push_back(encode_push(std::span(reinterpret_cast<const std::uint8_t*>(envelope_tag.data()), envelope_tag.size())));
  w.push_back({op::one});
  w.push_back(encode_push(std::span(reinterpret_cast<const std::uint8_t*>(content_type.data()), content_type.size())));
  w.push_back({op::false_});
  if (body.empty()) w.push_back(encode_push({}));
  for (std::size_t off = 0; off < body.size(); off += max_push_size)
    w.push_back(encode_push(body.subspan(off, std::min(max_push_size, body.size() - off))));
  w.push_back({op::endif});
  return w;
}

inline std::vector<bytes> build_envelope(std::string_view content_type, std::string_view body) {
  return build_envelope(content_type, std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
}

struct inscription {
  std::string id;  // "<txid>i<index>"
  std::uint64_t number = 0;
  envelope content;
  satpoint genesis_satpoint;
  std::uint64_t genesis_sat = 0;
  std::uint64_t height = 0;
  std::string genesis_owner;

  bool operator==(const inscription&) const = default;
};

inline std::string inscription_id(const txid_t& txid, std::uint32_t index) {
  return to_hex(txid) + "i" + std::to_string(index);
}

struct extract_diagnostic {
  std::string txid;
  std::uint32_t input = 0;
  std::string message;
};

struct extraction {
  std::vector<inscription> inscriptions;
  std::vector<extract_diagnostic> diagnostics;
};

/// Every input witness carrying a well-formed envelope yields one inscription
/// on the first sat of the transaction's first output. Malformed envelopes are
/// skipped with a diagnostic. `outputs` holds the block's FIFO assignment.
inline extraction extract_inscriptions(const block& b, const std::map<outpoint, range_list>& outputs,
                                       std::uint64_t first_number) {
  extraction ex;
  for (const auto& tx : b.txs) {
    std::uint32_t index = 0;
    for (std::uint32_t i = 0; i < tx.inputs.size(); ++i) {
      std::optional<envelope> env;
      try {
        env = parse_envelope(tx.inputs[i].witness);
      } catch (const error& e) {
        ex.diagnostics.push_back({to_hex(tx.txid), i, e.what()});
        continue;
      }
      if (!env) continue;
      auto out = outputs.find({tx.txid, 0});
      if (tx.outputs.empty() || out == outputs.end() || out->second.empty()) {
        ex.diagnostics.push_back({to_hex(tx.txid), i, "envelope has no sat to bind to"});
        continue;
      }
      inscription ins;
      ins.id = inscription_id(tx.txid, index++);
      ins.number = first_number + ex.inscriptions.size();
      ins.content = std::move(*env);
      ins.genesis_satpoint = {{tx.txid, 0}, 0};
      ins.genesis_sat = out->second.front().start;
      ins.height = b.height;
      ins.genesis_owner = tx.outputs.front().recipient;
      ex.inscriptions.push_back(std::move(ins));
    }
  }
  return ex;
}

}  // namespace ordx
