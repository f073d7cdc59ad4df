#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "naive_brc20.hpp"
#include "support.hpp"

using namespace ordx;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(ORDX_FIXTURES_DIR) + "/" + name; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

std::vector<block> read_chain(const std::string& path) {
  std::ifstream in(path);
  return read_blocks_jsonl(in);
}

std::string code_name(const diagnostic& d) { return d.message.substr(0, d.message.find(':')); }

}  // namespace

TEST(Fixture, MatchesHandReplayManifest) {
  auto blocks = read_chain(fixture("brc20_demo.jsonl"));
  auto want = read_json(fixture("brc20_demo.expected.json"));
  index_state st;
  for (const auto& b : blocks) {
    process_block(st, b);
    brc20::check_invariants(st.ledger);
  }
  EXPECT_EQ(blocks.size(), want["blocks"].get<std::size_t>());
  EXPECT_EQ(st.inscriptions.size(), want["inscriptions"].get<std::size_t>());
  std::vector<std::string> codes;
  for (const auto& d : st.diagnostics) codes.push_back(code_name(d));
  EXPECT_EQ(json(codes), want["diagnostics"]);
  auto view = brc20::balances_view(st.ledger);
  EXPECT_EQ(view["ticks"], want["ticks"]);
  EXPECT_EQ(view["balances"], want["balances"]);
}

TEST(Fixture, MatchesNaiveReplayOfScript) {
  auto script = read_json(fixture("brc20_demo.script.json"));
  naive::interpreter oracle;
  oracle.run(script);
  index_state st;
  index_blocks(st, read_chain(fixture("brc20_demo.jsonl")));
  EXPECT_EQ(brc20::balances_view(st.ledger).dump(), oracle.view().dump());
}

TEST(Fixture, CompilesToCheckedInChain) {
  auto out = scenario::compile(read_json(fixture("brc20_demo.script.json")));
  std::ifstream in(fixture("brc20_demo.jsonl"));
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(to_jsonl(out.blocks), ss.str());
}

TEST(Scenario, ListingsScript) {
  auto script = json::parse(R"([
    {"action":"deploy","by":"A","tick":"ordi","max":"2100000","lim":"1000"},
    {"action":"mint","by":"A","tick":"ordi","amt":"1000"},
    {"action":"transfer_inscribe","by":"A","tick":"ordi","amt":"100","label":"x"},
    {"action":"transfer_send","from":"A","to":"B","label":"x"}
  ])");
  auto out = scenario::compile(script);
  EXPECT_GE(out.blocks.size(), 3u);
  EXPECT_EQ(brc20::query_balance(out.state.ledger, "ordi", "A").available, brc20::amount::whole(900));
  EXPECT_EQ(brc20::query_balance(out.state.ledger, "ordi", "B").available, brc20::amount::whole(100));
}

TEST(Scenario, EmptyScriptEmptyChain) {
  auto out = scenario::compile(json::array());
  EXPECT_TRUE(out.blocks.empty());
  EXPECT_EQ(to_jsonl(out.blocks), "");
  EXPECT_EQ(snapshot_hash(out.state), snapshot_hash(index_state{}));
}

TEST(Scenario, InvalidActionNamesIndex) {
  auto script = json::parse(R"([
    {"action":"mine"},
    {"action":"transfer_send","from":"A","to":"B","label":"nope"}
  ])");
  try {
    scenario::compile(script);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::action_invalid);
    EXPECT_NE(std::string(e.what()).find("action 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(scenario::compile(json::parse(R"([{"action":"fly"}])")), error);
  EXPECT_THROW(scenario::compile(json::parse(R"({"action":"mine"})")), error);
}

TEST(Snapshot, EmptyStateHashIsStable) {
  index_state a, b;
  EXPECT_EQ(snapshot_hash(a), snapshot_hash(b));
  EXPECT_EQ(canonical_snapshot(a), canonical_snapshot(snapshot_from_json(snapshot_json(a))));
}

TEST(Snapshot, JsonRoundTrip) {
  auto out = scenario::compile(scenario::random_script(5, 80));
  auto back = snapshot_from_json(json::parse(snapshot_json(out.state).dump(2)));
  EXPECT_EQ(canonical_snapshot(back), canonical_snapshot(out.state));
  EXPECT_EQ(back.inscription_by_id, out.state.inscription_by_id);
  EXPECT_EQ(back.inscribed_sats, out.state.inscribed_sats);
}

TEST(Snapshot, SameChainSameHash) {
  auto blocks = read_chain(fixture("brc20_demo.jsonl"));
  index_state a, b;
  index_blocks(a, blocks);
  index_blocks(b, blocks);
  EXPECT_EQ(snapshot_hash(a), snapshot_hash(b));
}

TEST(Snapshot, HeightGapAbortsWithoutChange) {
  auto blocks = read_chain(fixture("brc20_demo.jsonl"));
  index_state st;
  index_blocks(st, {blocks.begin(), blocks.begin() + 5});
  const auto before = snapshot_hash(st);
  try {
    process_block(st, blocks[6]);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::non_monotonic_height);
  }
  EXPECT_EQ(snapshot_hash(st), before);
}

// index(full) == index(prefix), persist, reload, index(rest).
TEST(Property, PrefixThenRest) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto blocks = scenario::compile(scenario::random_script(seed, 40)).blocks;
    index_state full;
    index_blocks(full, blocks);
    std::mt19937_64 rng(seed);
    const auto cut = rng() % (blocks.size() + 1);
    index_state head;
    index_blocks(head, {blocks.begin(), blocks.begin() + static_cast<std::ptrdiff_t>(cut)});
    auto resumed = snapshot_from_json(json::parse(canonical_snapshot(head)));
    index_blocks(resumed, {blocks.begin() + static_cast<std::ptrdiff_t>(cut), blocks.end()});
    ASSERT_EQ(snapshot_hash(resumed), snapshot_hash(full)) << "seed " << seed << " cut " << cut;
  }
}

TEST(Property, ScenarioRoundTripMatchesInterpreter) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto script = scenario::random_script(seed, 60, 3, 4);
    naive::interpreter oracle;
    oracle.run(script);
    auto out = scenario::compile(script);
    ASSERT_EQ(brc20::balances_view(out.state.ledger).dump(), oracle.view().dump()) << "seed " << seed;
    ASSERT_TRUE(oracle.conserved());
  }
}
