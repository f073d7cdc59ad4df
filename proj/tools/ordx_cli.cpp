#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ordx/ordx.hpp"

namespace fs = std::filesystem;
using ordx::json;

namespace {

struct globals {
  std::string data_dir = "ordx-data";
  std::uint64_t seed = 42;
  double risk_free = 0.0;
  std::uint64_t fee = ordx::trade::default_fee;
};

fs::path snapshot_path(const globals& g) { return fs::path(g.data_dir) / "snapshot.json"; }
fs::path chain_log_path(const globals& g) { return fs::path(g.data_dir) / "blocks.jsonl"; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) ordx::fail(ordx::errc::parse_error, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const fs::path& p) {
  auto j = json::parse(read_file(p), nullptr, false);
  if (j.is_discarded()) ordx::fail(ordx::errc::parse_error, p.string() + " is not valid JSON");
  return j;
}

ordx::index_state load_state(const globals& g) {
  if (!fs::exists(snapshot_path(g))) return {};
  return ordx::snapshot_from_json(parse_json_file(snapshot_path(g)));
}

void write_atomically(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) ordx::fail(ordx::errc::parse_error, "cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, p);
}

void save_state(const globals& g, const ordx::index_state& st) {
  write_atomically(snapshot_path(g), ordx::snapshot_json(st).dump(2) + "\n");
}

void append_chain_log(const globals& g, const std::vector<ordx::block>& blocks) {
  fs::create_directories(g.data_dir);
  std::ofstream out(chain_log_path(g), std::ios::app);
  out << ordx::to_jsonl(blocks);
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json sat_json(std::uint64_t n, const ordx::index_state* st) {
  json j{{"n", n},
         {"decimal", ordx::format_decimal(n)},
         {"degree", ordx::sat_to_degree(n)},
         {"percentile", ordx::sat_to_percentile(n)},
         {"name", ordx::sat_to_name(n)},
         {"rarity", std::string(ordx::to_string(ordx::sat_rarity(n)))}};
  if (st)
    if (auto sp = ordx::sat_index(st->chain.utxos).find(n)) j["satpoint"] = ordx::to_string(*sp);
  return j;
}

json balance_json(const ordx::brc20::balance& b) {
  return {{"available", ordx::brc20::to_string(b.available)}, {"pending", ordx::brc20::to_string(b.pending)}};
}

json offer_json(const ordx::trade::offer& o) {
  return {{"id", o.id},
          {"seller", o.seller},
          {"inscription_id", o.inscription_id},
          {"ask", o.ask},
          {"status", ordx::trade::to_string(o.status)},
          {"psbt", ordx::trade::to_json(o.psbt)}};
}

int run(int argc, char** argv) {
  globals g;
  CLI::App app{"ordx: ordinals and BRC-20 indexer"};
  app.require_subcommand(1);
  app.add_option("--data-dir", g.data_dir, "Directory holding snapshot.json and blocks.jsonl");
  app.add_option("--seed", g.seed, "Seed for scenario generation");
  app.add_option("--risk-free", g.risk_free, "Risk-free rate per period for Sharpe ratios");
  app.add_option("--fee", g.fee, "Flat fee in sats for generated transactions");

  std::string input;
  auto* index = app.add_subcommand("index", "Index a JSONL block file ('-' for stdin) into the data dir");
  index->add_option("blocks", input, "Blocks JSONL")->required();

  std::string script_path, out_path;
  auto* compile = app.add_subcommand("compile", "Compile a scenario script into JSONL blocks");
  compile->add_option("script", script_path, "Scenario script (JSON list)")->required();
  compile->add_option("-o,--output", out_path, "Write JSONL here instead of stdout");

  std::size_t events = 50, ticks = 5, addresses = 8;
  auto* scenario = app.add_subcommand("scenario", "Print a random scenario script (uses --seed)");
  scenario->add_option("--events", events);
  scenario->add_option("--ticks", ticks)->check(CLI::Range(1, 5));
  scenario->add_option("--addresses", addresses)->check(CLI::Range(1, 8));

  std::string sat_arg;
  auto* sat = app.add_subcommand("sat", "Show every notation of a sat (integer, decimal, degree, percentile or name)");
  sat->add_option("sat", sat_arg)->required();

  std::optional<std::uint64_t> height;
  auto* inscriptions = app.add_subcommand("inscriptions", "List inscriptions");
  inscriptions->add_option("--height", height);

  std::string tick, addr;
  auto* brc20 = app.add_subcommand("brc20", "BRC-20 queries");
  brc20->require_subcommand(1);
  auto* brc20_tick = brc20->add_subcommand("tick", "Show a deployed tick");
  brc20_tick->add_option("tick", tick)->required();
  auto* brc20_balance = brc20->add_subcommand("balance", "Show an address balance");
  brc20_balance->add_option("tick", tick)->required();
  brc20_balance->add_option("address", addr)->required();

  std::string seller, buyer, inscription, offer_id, miner = "miner";
  std::uint64_t ask = 0;
  std::vector<std::string> funding;
  auto* trade = app.add_subcommand("trade", "PSBT trade workflow");
  trade->require_subcommand(1);
  auto* trade_offer = trade->add_subcommand("offer", "List a transfer inscription for sale");
  trade_offer->add_option("--seller", seller)->required();
  trade_offer->add_option("--inscription", inscription)->required();
  trade_offer->add_option("--ask", ask)->required();
  auto* trade_accept = trade->add_subcommand("accept", "Fund and sign an open offer");
  trade_accept->add_option("--offer", offer_id)->required();
  trade_accept->add_option("--buyer", buyer)->required();
  trade_accept->add_option("--funding", funding, "Outpoints txid:vout (default: buyer's cardinal outputs)");
  auto* trade_settle = trade->add_subcommand("settle", "Broadcast an accepted offer in the next block");
  trade_settle->add_option("--offer", offer_id)->required();
  trade_settle->add_option("--miner", miner);

  std::vector<std::string> csv_files;
  auto* metrics = app.add_subcommand("metrics", "Return statistics over price CSV files");
  metrics->add_option("files", csv_files)->required();

  std::string snap_file;
  auto* snapshot = app.add_subcommand("snapshot", "Snapshot management");
  snapshot->require_subcommand(1);
  auto* snap_save = snapshot->add_subcommand("save", "Copy the current snapshot to a file");
  snap_save->add_option("path", snap_file)->required();
  auto* snap_load = snapshot->add_subcommand("load", "Replace the current snapshot with a file");
  snap_load->add_option("path", snap_file)->required();
  auto* snap_hash = snapshot->add_subcommand("hash", "Print the snapshot hash");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*index) {
    auto st = load_state(g);
    std::vector<ordx::block> blocks;
    if (input == "-") {
      blocks = ordx::read_blocks_jsonl(std::cin);
    } else {
      std::ifstream in(input);
      if (!in) ordx::fail(ordx::errc::parse_error, "cannot open " + input);
      blocks = ordx::read_blocks_jsonl(in);
    }
    for (const auto& b : blocks) {
      try {
        ordx::process_block(st, b);
      } catch (const ordx::error& e) {
        throw ordx::error(e.code(), "at height " + std::to_string(b.height) + ": " + e.detail());
      }
    }
    save_state(g, st);
    append_chain_log(g, blocks);
    print({{"blocks", blocks.size()},
           {"tip", st.chain.tip ? json(*st.chain.tip) : json(nullptr)},
           {"inscriptions", st.inscriptions.size()},
           {"diagnostics", st.diagnostics.size()},
           {"hash", ordx::to_hex(ordx::snapshot_hash(st))}});
  } else if (*compile) {
    ordx::scenario::options opt;
    opt.fee = g.fee;
    auto result = ordx::scenario::compile(parse_json_file(script_path), opt);
    const auto jsonl = ordx::to_jsonl(result.blocks);
    if (out_path.empty())
      std::cout << jsonl;
    else
      write_atomically(out_path, jsonl);
  } else if (*scenario) {
    print(ordx::scenario::random_script(g.seed, events, ticks, addresses));
  } else if (*sat) {
    const auto n = ordx::parse_sat(sat_arg);
    if (fs::exists(snapshot_path(g))) {
      auto st = load_state(g);
      print(sat_json(n, &st));
    } else {
      print(sat_json(n, nullptr));
    }
  } else if (*inscriptions) {
    auto st = load_state(g);
    ordx::sat_index where(st.chain.utxos);
    json out = json::array();
    for (const auto& ins : st.inscriptions) {
      if (height && ins.height != *height) continue;
      json j = ordx::to_json(ins);
      j.erase("body");
      j["kind"] = std::string(ordx::brc20::to_string(ordx::brc20::classify(ins.content)));
      j["content_length"] = ins.content.body.size();
      auto sp = where.find(ins.genesis_sat);
      j["satpoint"] = sp ? json(ordx::to_string(*sp)) : json(nullptr);
      out.push_back(std::move(j));
    }
    print(out);
  } else if (*brc20_tick) {
    auto st = load_state(g);
    const auto& t = ordx::brc20::query_tick(st.ledger, tick);
    print({{"tick", t.tick},
           {"max", ordx::brc20::to_string(t.max)},
           {"lim", ordx::brc20::to_string(t.lim)},
           {"minted", ordx::brc20::to_string(t.minted)},
           {"deploy_id", t.deploy_id},
           {"height", t.deploy_height}});
  } else if (*brc20_balance) {
    auto st = load_state(g);
    print(balance_json(ordx::brc20::query_balance(st.ledger, ordx::brc20::normalize_tick(tick), addr)));
  } else if (*trade_offer) {
    auto st = load_state(g);
    auto o = ordx::trade::create_offer(st, seller, inscription, ask);
    save_state(g, st);
    print(offer_json(o));
  } else if (*trade_accept) {
    auto st = load_state(g);
    std::vector<ordx::outpoint> ops;
    for (const auto& f : funding) ops.push_back(ordx::detail::parse_outpoint(f));
    auto p = ordx::trade::accept_offer(st, offer_id, buyer, ops, g.fee);
    save_state(g, st);
    print({{"offer", offer_id},
           {"psbt", ordx::trade::to_json(p)},
           {"tx", ordx::to_json(ordx::trade::extract_transaction(p))}});
  } else if (*trade_settle) {
    auto st = load_state(g);
    auto s = ordx::trade::broadcast_and_settle(st, offer_id, miner);
    save_state(g, st);
    append_chain_log(g, {s.block});
    print({{"offer", offer_id},
           {"height", s.block.height},
           {"tx", ordx::to_json(s.tx)},
           {"tick", s.tick},
           {"tokens", ordx::brc20::to_string(s.tokens)},
           {"seller_btc_delta", s.seller_btc_delta},
           {"buyer_btc_delta", s.buyer_btc_delta},
           {"fee", s.fee},
           {"hash", ordx::to_hex(ordx::snapshot_hash(st))}});
  } else if (*metrics) {
    std::vector<ordx::metrics::series> all;
    for (const auto& f : csv_files) {
      std::ifstream in(f);
      if (!in) ordx::fail(ordx::errc::parse_error, "cannot open " + f);
      all.push_back(ordx::metrics::read_price_csv(in, fs::path(f).stem().string()));
    }
    print(ordx::metrics::report(all, g.risk_free));
  } else if (*snap_save) {
    auto st = load_state(g);
    write_atomically(snap_file, ordx::snapshot_json(st).dump(2) + "\n");
    print({{"saved", snap_file}, {"hash", ordx::to_hex(ordx::snapshot_hash(st))}});
  } else if (*snap_load) {
    auto st = ordx::snapshot_from_json(parse_json_file(snap_file));
    save_state(g, st);
    print({{"loaded", snap_file}, {"hash", ordx::to_hex(ordx::snapshot_hash(st))}});
  } else if (*snap_hash) {
    auto st = load_state(g);
    print({{"hash", ordx::to_hex(ordx::snapshot_hash(st))}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ordx::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ordx::errc::invariant_violation ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
