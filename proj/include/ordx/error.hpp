#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ordx {

enum class errc {
  // chain
  missing_prevout,
  negative_fee,
  double_spend,
  coinbase_overpay,
  non_monotonic_height,
  bad_coinbase,
  duplicate_txid,
  block_too_large,
  // ordinals
  height_beyond_supply,
  offset_out_of_block,
  invalid_name_char,
  name_out_of_range,
  invalid_notation,
  range_value_mismatch,
  sat_not_in_utxo_set,
  // inscriptions
  malformed_envelope,
  unbalanced_if,
  body_too_large,
  invalid_content_type,
  // brc-20
  not_json,
  wrong_protocol,
  unknown_op,
  missing_field,
  bad_amount,
  bad_tick,
  lim_exceeds_max,
  tick_exists,
  unknown_tick,
  exceeds_lim,
  exceeds_max,
  insufficient_balance,
  unknown_pending,
  already_used,
  not_owner,
  // trade
  not_pending_transfer,
  structure_mismatch,
  insufficient_funds,
  offer_not_open,
  signature_invalid,
  bad_ask,
  unknown_offer,
  // metrics
  too_few_points,
  zero_volatility,
  insufficient_overlap,
  zero_variance,
  bad_series,
  // io / cli
  parse_error,
  action_invalid,
  invariant_violation,
};

constexpr std::string_view to_string(errc c) {
  switch (c) {
    case errc::missing_prevout: return "MissingPrevout";
    case errc::negative_fee: return "NegativeFee";
    case errc::double_spend: return "DoubleSpend";
    case errc::coinbase_overpay: return "CoinbaseOverpay";
    case errc::non_monotonic_height: return "NonMonotonicHeight";
    case errc::bad_coinbase: return "BadCoinbase";
    case errc::duplicate_txid: return "DuplicateTxid";
    case errc::block_too_large: return "BlockTooLarge";
    case errc::height_beyond_supply: return "HeightBeyondSupply";
    case errc::offset_out_of_block: return "OffsetOutOfBlock";
    case errc::invalid_name_char: return "InvalidNameChar";
    case errc::name_out_of_range: return "NameOutOfRange";
    case errc::invalid_notation: return "InvalidNotation";
    case errc::range_value_mismatch: return "RangeValueMismatch";
    case errc::sat_not_in_utxo_set: return "SatNotInUtxoSet";
    case errc::malformed_envelope: return "MalformedEnvelope";
    case errc::unbalanced_if: return "UnbalancedIf";
    case errc::body_too_large: return "BodyTooLarge";
    case errc::invalid_content_type: return "InvalidContentType";
    case errc::not_json: return "NotJson";
    case errc::wrong_protocol: return "WrongProtocol";
    case errc::unknown_op: return "UnknownOp";
    case errc::missing_field: return "MissingField";
    case errc::bad_amount: return "BadAmount";
    case errc::bad_tick: return "BadTick";
    case errc::lim_exceeds_max: return "LimExceedsMax";
    case errc::tick_exists: return "TickExists";
    case errc::unknown_tick: return "UnknownTick";
    case errc::exceeds_lim: return "ExceedsLim";
    case errc::exceeds_max: return "ExceedsMax";
    case errc::insufficient_balance: return "InsufficientBalance";
    case errc::unknown_pending: return "UnknownPending";
    case errc::already_used: return "AlreadyUsed";
    case errc::not_owner: return "NotOwner";
    case errc::not_pending_transfer: return "NotPendingTransfer";
    case errc::structure_mismatch: return "StructureMismatch";
    case errc::insufficient_funds: return "InsufficientFunds";
    case errc::offer_not_open: return "OfferNotOpen";
    case errc::signature_invalid: return "SignatureInvalid";
    case errc::bad_ask: return "BadAsk";
    case errc::unknown_offer: return "UnknownOffer";
    case errc::too_few_points: return "TooFewPoints";
    case errc::zero_volatility: return "ZeroVolatility";
    case errc::insufficient_overlap: return "InsufficientOverlap";
    case errc::zero_variance: return "ZeroVariance";
    case errc::bad_series: return "BadSeries";
    case errc::parse_error: return "ParseError";
    case errc::action_invalid: return "ActionInvalid";
    case errc::invariant_violation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an `error` carrying
/// a machine-readable code. Invariant violations use `errc::invariant_violation`
/// and indicate a bug rather than bad input.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  errc code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void ensure(bool cond, const std::string& what) {
  if (!cond) fail(errc::invariant_violation, what);
}

}  // namespace ordx
