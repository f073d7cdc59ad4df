#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ordx;
using namespace ordx::testing;

namespace {

// Spendable outputs of the given values, owned by "src".
struct funded {
  index_state st;
  std::vector<outpoint> ops;

  explicit funded(std::vector<std::uint64_t> values, chain_params p = tiny_params(100)) : st(p) {
    std::vector<tx_out> outs;
    for (auto v : values) outs.push_back(pay(v, "src"));
    auto b = make_block(0, outs);
    process_block(st, b);
    for (std::uint32_t v = 0; v < values.size(); ++v) ops.push_back({b.txs[0].txid, v});
  }
};

std::uint64_t subsidy_oracle(std::uint64_t height) {
  std::uint64_t s = 5'000'000'000;
  for (std::uint64_t e = 0; e < height / 210'000; ++e) s /= 2;
  return s;
}

}  // namespace

TEST(Subsidy, Schedule) {
  EXPECT_EQ(block_subsidy(0), 5'000'000'000u);
  EXPECT_EQ(block_subsidy(209'999), 5'000'000'000u);
  EXPECT_EQ(block_subsidy(210'000), 2'500'000'000u);
  EXPECT_EQ(block_subsidy(6'930'000), 0u);
  for (std::uint64_t h = 0; h < 7'000'000; h += 104'999) EXPECT_EQ(block_subsidy(h), subsidy_oracle(h)) << h;
}

TEST(Subsidy, TotalSupplyIsSumOfEpochs) {
  std::uint64_t total = 0;
  for (std::uint64_t h = 0; h < 7'000'000; h += 210'000) total += 210'000 * subsidy_oracle(h);
  EXPECT_EQ(total - 1, 2'099'999'997'689'999u);
  EXPECT_EQ(chain_params::mainnet().total_supply(), total);
}

TEST(Fee, Examples) {
  funded f({3, 3, 2, 2, 5});
  const auto& u = f.st.chain.utxos;
  EXPECT_EQ(tx_fee(make_tx({f.ops[0], f.ops[1]}, {pay(4, "x"), pay(2, "y")}), u), 0u);
  EXPECT_EQ(tx_fee(make_tx({f.ops[2], f.ops[3]}, {pay(3, "x")}), u), 1u);
  try {
    tx_fee(make_tx({f.ops[4]}, {pay(6, "x")}), u);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::negative_fee);
  }
  try {
    tx_fee(make_tx({{sha256("nowhere"), 0}}, {pay(1, "x")}), u);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::missing_prevout);
  }
}

TEST(Vsize, QuarterWitnessRoundsUp) {
  transaction tx = make_tx({{sha256("a"), 0}}, {pay(1, "x")});
  const auto body = body_size(tx);
  EXPECT_EQ(tx_vsize(tx), body);
  tx.inputs[0].witness = {bytes(400)};
  EXPECT_EQ(witness_size(tx), 400u);
  EXPECT_EQ(tx_vsize(tx), body + 100);
  EXPECT_EQ(body_size(tx), body) << "witness must not count toward body";
  tx.inputs[0].witness = {bytes(400), bytes(2)};
  EXPECT_EQ(tx_vsize(tx), body + 101);
  EXPECT_EQ(tx_weight(tx), 4 * body + 402);
}

TEST(Vsize, BodyIsWitnessFreeCanonicalJson) {
  transaction tx = make_tx({{sha256("a"), 7}}, {pay(546, "bob", script_kind::p2tr_inscription)});
  auto j = to_json(tx, false);
  EXPECT_FALSE(j["inputs"][0].contains("witness"));
  EXPECT_EQ(body_size(tx), j.dump().size());
}

TEST(FeeRate, ExactRational) {
  EXPECT_EQ(rational::make(100, 200), (rational{1, 2}));
  EXPECT_EQ(rational::make(0, 250), (rational{0, 1}));
  EXPECT_EQ(rational::make(1, 3), (rational{1, 3}));
  EXPECT_EQ(to_string(rational::make(6, 4)), "3/2");
}

TEST(FeeRate, TimesVsizeIsFee) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t in = 1 + rng() % 100'000, out = rng() % (in + 1);
    funded f({in}, tiny_params(in));
    auto tx = make_tx({f.ops[0]}, {pay(out, "x")}, {{bytes(rng() % 900)}});
    auto r = fee_rate(tx, f.st.chain.utxos);
    ASSERT_EQ(r.num * tx_vsize(tx), tx_fee(tx, f.st.chain.utxos) * r.den);
    ASSERT_EQ(std::gcd(r.num, r.den), 1u);
  }
}

TEST(Block, GenesisCreatesOneOutput) {
  chain_state st;
  auto b = make_block(0, {pay(5'000'000'000, "satoshi")});
  auto rep = validate_and_apply_block(b, st);
  ASSERT_EQ(st.utxos.size(), 1u);
  const auto& e = st.utxos.begin()->second;
  EXPECT_EQ(e.out.value, 5'000'000'000u);
  EXPECT_EQ(e.ranges, (range_list{{0, 5'000'000'000}}));
  EXPECT_EQ(rep.created.size(), 1u);
  EXPECT_EQ(st.tip, 0u);
}

TEST(Block, Rejections) {
  funded f({40, 60});
  auto expect_code = [&](const block& b, errc want) {
    const auto before = snapshot_hash(f.st);
    try {
      process_block(f.st, b);
      ADD_FAILURE() << "accepted, wanted " << to_string(want);
    } catch (const error& e) {
      EXPECT_EQ(e.code(), want) << e.what();
    }
    EXPECT_EQ(snapshot_hash(f.st), before);
  };
  auto spend0 = make_tx({f.ops[0]}, {pay(40, "x")});
  process_block(f.st, make_block(1, {pay(100, "m")}, {spend0}));

  expect_code(make_block(2, {pay(100, "m")}, {make_tx({f.ops[0]}, {pay(39, "y")})}), errc::double_spend);
  expect_code(make_block(3, {pay(100, "m")}), errc::non_monotonic_height);
  expect_code(make_block(1, {pay(100, "m")}), errc::non_monotonic_height);
  expect_code(make_block(2, {pay(101, "m")}), errc::coinbase_overpay);
  expect_code(make_block(2, {pay(100, "m")}, {make_tx({{sha256("?"), 0}}, {pay(1, "y")})}), errc::missing_prevout);
  expect_code(make_block(2, {pay(100, "m")}, {make_tx({f.ops[1]}, {pay(61, "y")})}), errc::negative_fee);
  // Both spends in one block.
  expect_code(make_block(2, {pay(100, "m")},
                         {make_tx({f.ops[1]}, {pay(60, "y")}), make_tx({f.ops[1]}, {pay(59, "z")})}),
              errc::double_spend);
  block no_cb;
  no_cb.height = 2;
  expect_code(no_cb, errc::bad_coinbase);
  auto huge = make_tx({f.ops[1]}, {pay(60, "y")}, {{bytes(4'000'001)}});
  expect_code(make_block(2, {pay(100, "m")}, {huge}), errc::block_too_large);
}

TEST(Block, FeesFundCoinbase) {
  funded f({40, 60});
  auto b = make_block(1, {pay(100 + 7, "m")}, {make_tx({f.ops[1]}, {pay(53, "y")})});
  auto rep = process_block(f.st, b);
  EXPECT_EQ(rep.fees, 7u);
  EXPECT_EQ(rep.tx_fees, (std::vector<std::uint64_t>{0, 7}));
  EXPECT_EQ(utxo_total(f.st.chain.utxos), 200u);
}

TEST(Block, SpendOutputCreatedEarlierInBlock) {
  funded f({40});
  auto a = make_tx({f.ops[0]}, {pay(40, "x")});
  auto b = make_tx({{a.txid, 0}}, {pay(38, "y")});
  process_block(f.st, make_block(1, {pay(102, "m")}, {a, b}));
  EXPECT_EQ(f.st.chain.utxos.count({a.txid, 0}), 0u);
  EXPECT_EQ(f.st.chain.utxos.at({b.txid, 0}).out.value, 38u);
}

TEST(Block, JsonlRoundTrip) {
  funded f({40});
  auto b = make_block(1, {pay(100, "m")}, {make_tx({f.ops[0]}, {pay(40, "x")}, {{bytes{0x01, 0xab}, bytes{}}})});
  std::istringstream in(to_jsonl({b}));
  auto back = read_blocks_jsonl(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], b);
}

TEST(Block, JsonlRejectsUppercaseTxid) {
  auto line = to_json(make_block(0, {pay(1, "m")})).dump();
  for (auto& c : line)
    if (c >= 'a' && c <= 'f') c = static_cast<char>(c - 32);
  std::istringstream in(line);
  EXPECT_THROW(read_blocks_jsonl(in), error);
}

// Value conservation and atomicity over random chains.
TEST(Property, ValueConservationAndAtomicity) {
  std::mt19937_64 rng(2024);
  for (int run = 0; run < 20; ++run) {
    index_state st(tiny_params(50, 7));
    std::uint64_t minted = 0, burned = 0;
    for (int h = 0; h < 40; ++h) {
      auto b = random_block(st, rng);
      auto rep = process_block(st, b);
      minted += rep.subsidy;
      burned += rep.subsidy + rep.fees - rep.coinbase_claimed;
      ASSERT_EQ(utxo_total(st.chain.utxos), minted - burned);
      ASSERT_EQ(utxo_ranges_problem(st.chain.utxos), "");

      // A corrupted copy of the next block must not change anything.
      auto bad = random_block(st, rng);
      switch (rng() % 3) {
        case 0: bad.height += 1; break;
        case 1: bad.txs[0].outputs.push_back(pay(st.chain.params.subsidy(bad.height) + 1000, "greedy")); break;
        default:
          if (!st.chain.spent.empty()) bad.txs.push_back(make_tx({*st.chain.spent.begin()}, {pay(0, "x")}));
          else bad.height += 1;
      }
      const auto before = snapshot_hash(st);
      EXPECT_THROW(process_block(st, bad), error);
      ASSERT_EQ(snapshot_hash(st), before);
    }
  }
}
