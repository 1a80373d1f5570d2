#include "mevr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <system_error>

namespace mevr::io {
namespace {

const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string(what) + ": missing field \"" + key + "\"");
  return *it;
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<int>();
}

std::vector<double> as_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(as_number(j[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

// 1-based label list to a 0-based coalition mask.
Coalition as_coalition(const Json& j, int n, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of 1-based labels");
  Coalition s = 0;
  for (const Json& label : j) {
    const int p = as_int(label, where);
    if (p < 1 || p > n) {
      throw ValidationError(where + ": label " + std::to_string(p) + " outside 1.." +
                            std::to_string(n));
    }
    s |= player_bit(p - 1);
  }
  return s;
}

Json numbers(std::span<const double> xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(x);
  return out;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

Game game_from_json(const Json& j) {
  const int n = as_int(require(j, "n", "game"), "game.n");
  if (n < 1 || n > kMaxPlayers) {
    throw ValidationError("game.n must lie in [1, " + std::to_string(kMaxPlayers) + "]");
  }
  if (j.contains("unanimity")) {
    const Coalition carrier = as_coalition(j["unanimity"], n, "game.unanimity");
    if (carrier == 0) throw ValidationError("game.unanimity: carrier must be nonempty");
    const double scale = j.contains("scale") ? as_number(j["scale"], "game.scale") : 1.0;
    if (!(scale >= 0.0)) throw ValidationError("game.scale must be >= 0");
    return unanimity_game(n, carrier).scaled(scale);
  }
  std::vector<double> values = as_numbers(require(j, "values", "game"), "game.values");
  const bool monotone = j.contains("monotone") && j["monotone"].is_boolean() && j["monotone"].get<bool>();
  return Game::make(n, std::move(values), monotone);
}

Json to_json(const Game& g) {
  Json out;
  out["n"] = g.players();
  out["values"] = numbers(g.values());
  out["monotone"] = g.monotone();
  return out;
}

PriorModel prior_from_json(const Json& j) {
  const Json& p = require(j, "p", "prior");
  if (!p.is_object() || p.empty()) {
    throw ValidationError("prior.p: expected an object mapping player counts to masses");
  }
  std::vector<double> masses;
  for (const auto& [key, value] : p.items()) {
    int n = 0;
    const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), n);
    if (ec != std::errc{} || end != key.data() + key.size() || n < 1) {
      throw ValidationError("prior.p: key '" + key + "' is not a positive player count");
    }
    if (n > 64) throw ValidationError("prior.p: player count " + key + " exceeds 64");
    if (static_cast<int>(masses.size()) < n) masses.resize(n, 0.0);
    masses[n - 1] = as_number(value, "prior.p." + key);
  }
  std::optional<int> y_max;
  if (j.contains("y_max")) y_max = as_int(j["y_max"], "prior.y_max");
  return PriorModel::make(std::move(masses), y_max);
}

TokenGraph graph_from_json(const Json& j) {
  TokenGraph g;
  const Json& num = require(j, "numeraire", "graph");
  if (!num.is_string()) throw ValidationError("graph.numeraire: expected a token name");
  g.numeraire = num.get<std::string>();
  const Json& pools = require(j, "pools", "graph");
  if (!pools.is_array()) throw ValidationError("graph.pools: expected an array");
  for (std::size_t k = 0; k < pools.size(); ++k) {
    const std::string where = "graph.pools[" + std::to_string(k) + "]";
    const Json& pj = pools[k];
    Pool pool;
    const Json& pair = require(pj, "pair", where.c_str());
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      throw ValidationError(where + ".pair: expected two token names");
    }
    pool.pair = {pair[0].get<std::string>(), pair[1].get<std::string>()};
    const std::vector<double> reserves = as_numbers(require(pj, "reserves", where.c_str()), where + ".reserves");
    if (reserves.size() != 2) throw ValidationError(where + ".reserves: expected two numbers");
    pool.reserves = {reserves[0], reserves[1]};
    if (pj.contains("kind")) {
      if (!pj["kind"].is_string()) throw ValidationError(where + ".kind: expected cp|wg");
      pool.kind = parse_pool_kind(pj["kind"].get<std::string>());
    }
    if (pj.contains("weight")) pool.weight = as_number(pj["weight"], where + ".weight");
    pool.owner = as_int(require(pj, "owner", where.c_str()), where + ".owner") - 1;
    if (pool.owner < 0) throw ValidationError(where + ".owner: owners are labelled from 1");
    g.pools.push_back(std::move(pool));
  }
  g.validate();
  return g;
}

Json to_json(const TokenGraph& g) {
  Json out;
  out["numeraire"] = g.numeraire;
  Json pools = Json::array();
  for (const Pool& p : g.pools) {
    Json pj;
    pj["pair"] = {p.pair[0], p.pair[1]};
    pj["reserves"] = {p.reserves[0], p.reserves[1]};
    pj["kind"] = to_string(p.kind);
    if (p.kind == PoolKind::kWeightedGeometric) pj["weight"] = p.weight;
    pj["owner"] = p.owner + 1;
    pools.push_back(std::move(pj));
  }
  out["pools"] = std::move(pools);
  return out;
}

AuctionInstance auction_from_json(const Json& j) {
  AuctionInstance inst;
  inst.bids = as_numbers(require(j, "bids", "auction"), "auction.bids");
  const int n = static_cast<int>(inst.bids.size());
  if (n < 1 || n > kMaxEnumerationPlayers) {
    throw ValidationError("auction.bids: expected 1.." + std::to_string(kMaxEnumerationPlayers) +
                          " bids");
  }
  const bool has_conflicts = j.contains("conflicts");
  const bool has_maximal = j.contains("feasible_maximal");
  if (has_conflicts && has_maximal) {
    throw ValidationError("auction: give either \"conflicts\" or \"feasible_maximal\", not both");
  }
  if (has_maximal) {
    const Json& sets = j["feasible_maximal"];
    if (!sets.is_array()) throw ValidationError("auction.feasible_maximal: expected an array");
    std::vector<Coalition> maximal;
    for (const Json& s : sets) maximal.push_back(as_coalition(s, n, "auction.feasible_maximal"));
    inst.family = FeasibleFamily::from_maximal_sets(n, maximal);
  } else {
    std::vector<std::pair<int, int>> conflicts;
    if (has_conflicts) {
      const Json& pairs = j["conflicts"];
      if (!pairs.is_array()) throw ValidationError("auction.conflicts: expected an array of pairs");
      for (const Json& pair : pairs) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ValidationError("auction.conflicts: each entry must be a pair [i, j]");
        }
        conflicts.emplace_back(as_int(pair[0], "auction.conflicts") - 1,
                               as_int(pair[1], "auction.conflicts") - 1);
      }
    }
    inst.family = FeasibleFamily::from_conflicts(n, conflicts);
  }
  if (j.contains("oracle")) {
    inst.oracle = game_from_json(j["oracle"]);
  } else {
    inst.oracle = Game::make(n, std::vector<double>(std::size_t{1} << n, 0.0));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ValidationError("auction.seed: expected a non-negative integer");
    }
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  inst.validate();
  return inst;
}

Json coalition_json(Coalition s) {
  Json out = Json::array();
  for (int p : members(s)) out.push_back(p + 1);
  return out;
}

Json to_json(const SybilExtension& ext) {
  Json out;
  out["player"] = ext.player + 1;
  Json steps = Json::array();
  for (const SybilStep& s : ext.steps) steps.push_back({{"family", to_string(s.family)}, {"k", s.k}});
  out["steps"] = std::move(steps);
  out["identities"] = coalition_json(ext.identities());
  out["extended"] = to_json(ext.extended);
  return out;
}

Json to_json(const OperatorReport& r) {
  Json out;
  out["operator"] = to_string(r.op);
  out["payments"] = numbers(r.payments.payments());
  out["welfare"] = r.welfare;
  if (r.bounds) {
    Json bounds = Json::array();
    for (const PlayerBounds& b : *r.bounds) bounds.push_back({b.lower, b.upper});
    out["bounds"] = std::move(bounds);
  }
  return out;
}

Json to_json(const AxiomAudit& a) {
  Json out;
  out["axiom"] = to_string(a.axiom);
  out["verdict"] = a.pass ? "pass" : "fail";
  out["games_checked"] = a.games_checked;
  out["violations"] = a.violations;
  if (a.witness) {
    Json w;
    w["description"] = a.witness->description;
    Json games = Json::array();
    for (const Game& g : a.witness->games) games.push_back(to_json(g));
    w["games"] = std::move(games);
    Json players = Json::array();
    for (int p : a.witness->players) players.push_back(p + 1);
    w["players"] = std::move(players);
    w["lhs"] = a.witness->lhs;
    w["rhs"] = a.witness->rhs;
    out["witness"] = std::move(w);
  }
  return out;
}

Json to_json(const SybilAttackReport& r) {
  Json out;
  out["operator"] = to_string(r.op);
  out["player"] = r.player + 1;
  out["family"] = to_string(r.family);
  out["payoffs"] = numbers(r.payoffs);
  Json chains = Json::array();
  for (const auto& chain : r.chains) {
    Json c = Json::array();
    for (const SybilStep& s : chain) c.push_back({{"family", to_string(s.family)}, {"k", s.k}});
    chains.push_back(std::move(c));
  }
  out["chains"] = std::move(chains);
  out["best_k"] = r.best_k;
  out["best_payoff"] = r.best_payoff;
  out["profitable"] = r.profitable();
  out["divergent"] = r.divergent;
  return out;
}

Json to_json(const RebatePolicy& p) {
  Json out;
  Json w = Json::object();
  Json x = Json::object();
  for (std::size_t k = 0; k < p.welfare.size(); ++k) {
    const std::string key = std::to_string(k + 1);
    w[key] = p.welfare[k];
    x[key] = p.per_identity(static_cast<int>(k + 1));
  }
  out["W"] = std::move(w);
  out["X"] = std::move(x);
  out["expected_welfare"] = p.expected_welfare;
  return out;
}

Json to_json(const Outcome& o) {
  Json out;
  out["allocation"] = coalition_json(o.allocation);
  out["allocation_mask"] = o.allocation;
  out["payments"] = numbers(o.payments);
  out["builder_payment"] = o.builder_payment;
  out["welfare"] = o.welfare;
  out["revenue"] = o.revenue;
  out["deficit"] = o.deficit;
  out["tie"] = o.tie;
  return out;
}

Json to_json(const CycleArbResult& r) {
  Json out;
  out["profit"] = r.profit;
  out["input"] = r.input;
  if (r.cycle) {
    out["tokens"] = r.cycle->tokens;
    Json pools = Json::array();
    for (int idx : r.cycle->pools) pools.push_back(idx + 1);
    out["pools"] = std::move(pools);
    out["owners"] = coalition_json(r.cycle->owners);
  } else {
    out["tokens"] = Json::array();
  }
  return out;
}

Json to_json(const TokenSplitReport& r) {
  Json out;
  out["operator"] = to_string(r.op);
  out["owner"] = r.owner + 1;
  out["identities"] = coalition_json(r.identities);
  out["before_payoff"] = r.before_payoff;
  out["after_payoff"] = r.after_payoff;
  out["profitable"] = r.profitable();
  out["before"] = to_json(r.before);
  out["after"] = to_json(r.after);
  if (r.split_graph) out["split_graph"] = to_json(*r.split_graph);
  return out;
}

Json to_json(const ProbeReport& r) {
  Json out;
  out["mechanism"] = to_string(r.mechanism);
  out["trials"] = r.trials;
  out["violations"] = r.violations;
  if (r.witness) {
    Json w;
    w["bids"] = numbers(r.witness->instance.bids);
    w["bundle"] = r.witness->bundle + 1;
    w["deviating_bid"] = r.witness->deviating_bid;
    w["truthful_utility"] = r.witness->truthful_utility;
    w["deviating_utility"] = r.witness->deviating_utility;
    out["witness"] = std::move(w);
  }
  return out;
}

Json to_json(const SybilSplitReport& r) {
  Json out;
  out["mechanism"] = to_string(r.mechanism);
  out["epsilon"] = r.epsilon;
  out["before"] = to_json(r.before);
  out["after"] = to_json(r.after);
  out["payment_before"] = r.payment_before;
  out["utility_before"] = r.utility_before;
  out["payments_after"] = {r.payments_after.first, r.payments_after.second};
  out["utility_after"] = r.utility_after;
  out["tie"] = r.tie();
  out["sybil_profitable"] = r.profitable();
  return out;
}

Json to_json(const NegativeResultReport& r) {
  Json out;
  out["scale"] = r.scale;
  out["welfare_positive"] = to_json(r.welfare_positive);
  out["empty"] = to_json(r.empty);
  out["deficit"] = r.deficit;
  return out;
}

Json to_json(const NonComparabilityReport& r) {
  const auto witness = [](const ComparisonWitness& w) {
    Json out;
    out["bids"] = numbers(w.instance.bids);
    out["oracle"] = to_json(w.instance.oracle);
    out["rule"] = w.options.rule == ThresholdRule::kClamped ? "clamped" : "signed";
    out["myerson"] = to_json(w.myerson);
    out["mev_max"] = to_json(w.mev_max);
    return out;
  };
  Json out;
  out["myerson_better"] = witness(r.myerson_better);
  out["mev_max_better"] = witness(r.mev_max_better);
  return out;
}

Json to_json(const TrilemmaRow& r) {
  Json out;
  out["operator"] = to_string(r.op);
  out["S"] = to_json(r.symmetry);
  out["CP"] = to_json(r.collusion_proof);
  out["GSP"] = to_json(r.general_sybil_proof);
  out["passes_all"] = r.passes_all();
  return out;
}

Json envelope(std::string_view kind, Json body) {
  Json out;
  out["schema"] = kSchemaVersion;
  out["kind"] = kind;
  if (body.is_object()) {
    for (auto& [key, value] : body.items()) out[key] = std::move(value);
  } else {
    out["result"] = std::move(body);
  }
  return out;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw InternalError("format_number: buffer too small");
  return std::string(buf, end);
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InternalError("csv: row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += ',';
      const std::string& cell = cells[c];
      if (cell.find_first_of(",\"\n") == std::string::npos) {
        out += cell;
        continue;
      }
      out += '"';
      for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
    out += '\n';
  };
  line(header_);
  for (const auto& row : rows_) line(row);
  return out;
}

CsvTable sweep_csv(std::span<const int> support, std::span<const SweepRow> rows) {
  std::vector<std::string> header;
  for (int n : support) header.push_back("p" + std::to_string(n));
  header.emplace_back("optimal_welfare");
  header.emplace_back("prior_free_welfare");
  CsvTable table(std::move(header));
  for (const SweepRow& r : rows) {
    std::vector<std::string> cells;
    for (double p : r.p) cells.push_back(format_number(p));
    cells.push_back(format_number(r.optimal_welfare));
    cells.push_back(format_number(r.prior_free_welfare));
    table.add_row(std::move(cells));
  }
  return table;
}

void write_output(const std::string& path, std::string_view content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

}  // namespace mevr::io
