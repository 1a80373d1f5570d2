#include "mevr/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string_view>

#include "mevr/auctions.hpp"
#include "mevr/audit.hpp"
#include "mevr/cfmm.hpp"
#include "mevr/io.hpp"
#include "mevr/operators.hpp"
#include "mevr/prior.hpp"
#include "mevr/regressions.hpp"

namespace mevr::cli {
namespace {

using io::Json;

enum class LogLevel { kQuiet, kInfo, kDebug };

LogLevel log_level() {
  const char* env = std::getenv("MEVR_LOG");
  if (env == nullptr) return LogLevel::kQuiet;
  const std::string_view v(env);
  if (v == "debug") return LogLevel::kDebug;
  if (v == "info") return LogLevel::kInfo;
  return LogLevel::kQuiet;
}

struct Options {
  std::string game;
  std::string prior;
  std::string graph;
  std::string auction;
  std::string ops;
  std::string axioms;
  std::string out;
  std::string format;
  std::string family = "mixed";
  std::string mechanism = "myerson";
  std::string rule = "clamped";
  std::string scenario;
  std::string support = "3,4,5";
  int k_max = -1;
  int y_max = -1;
  int player = 1;
  int pool = 1;
  int max_len = 6;
  int games_per_n = -1;
  int max_n = -1;
  double step = 0.1;
  double epsilon = 0.01;
  double scale = 1.0;
  double tolerance = kTolerance;
  std::uint64_t seed = 42;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err), level_(log_level()) {}

  void info(const std::string& msg) const {
    if (level_ != LogLevel::kQuiet) err_ << "[info] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ == LogLevel::kDebug) err_ << "[debug] " << msg << '\n';
  }

  std::string format(std::string_view fallback) const {
    std::string f = o_.format;
    if (f.empty()) {
      const bool csv_path = o_.out.size() > 4 && o_.out.ends_with(".csv");
      const bool json_path = o_.out.size() > 5 && o_.out.ends_with(".json");
      f = csv_path ? "csv" : json_path ? "json" : std::string(fallback);
    }
    if (f != "json" && f != "csv") throw ValidationError("--format must be json or csv");
    return f;
  }

  void emit(std::string_view content) const {
    if (o_.out.empty() || o_.out == "-") {
      out_ << content;
    } else {
      io::write_output(o_.out, content);
      info("wrote " + o_.out);
    }
  }

  void emit_json(std::string_view kind, Json body) const {
    emit(io::envelope(kind, std::move(body)).dump(2) + "\n");
  }

  Game load_game() const {
    if (o_.game.empty()) throw ValidationError("--game is required");
    debug("reading game " + o_.game);
    return io::game_from_json(io::read_json_file(o_.game));
  }

  std::vector<OperatorId> operators(std::string_view fallback) const {
    const std::string list = o_.ops.empty() ? std::string(fallback) : o_.ops;
    std::vector<OperatorId> ops;
    std::stringstream in(list);
    for (std::string name; std::getline(in, name, ',');) {
      if (!name.empty()) ops.push_back(parse_operator(name));
    }
    if (ops.empty()) throw ValidationError("--op lists no operators");
    return ops;
  }

  OperatorConfig op_config() const {
    OperatorConfig c;
    if (o_.k_max >= 0) c.psi.k_max = o_.k_max;
    return c;
  }

  int run(std::string_view command) const {
    if (command == "operators") return cmd_operators();
    if (command == "audit") return cmd_audit();
    if (command == "sybil-search") return cmd_sybil_search();
    if (command == "prior-lp") return cmd_prior_lp();
    if (command == "prior-sweep") return cmd_prior_sweep();
    if (command == "cfmm-game") return cmd_cfmm_game();
    if (command == "cfmm-attack") return cmd_cfmm_attack();
    if (command == "auction") return cmd_auction();
    if (command == "scenario") return cmd_scenario();
    if (command == "paper-check") return cmd_regression_check();
    throw ValidationError("unknown subcommand '" + std::string(command) + "'");
  }

 private:
  int cmd_operators() const {
    const Game g = load_game();
    const auto ops = operators("shapley,banzhaf,theta,psi,psi_bar,banzhaf_clamped");
    const OperatorConfig config = op_config();
    std::vector<OperatorReport> reports;
    for (OperatorId op : ops) {
      info("evaluating " + std::string(to_string(op)));
      reports.push_back(report(op, g, config));
    }
    if (format("json") == "csv") {
      // Exact operators leave the bound columns empty.
      io::CsvTable table({"player", "operator", "payment", "lower", "upper"});
      for (int i = 0; i < g.players(); ++i) {
        for (const OperatorReport& r : reports) {
          std::string lower;
          std::string upper;
          if (r.bounds) {
            lower = io::format_number((*r.bounds)[i].lower);
            upper = io::format_number((*r.bounds)[i].upper);
          }
          table.add_row({std::to_string(i + 1), std::string(to_string(r.op)),
                         io::format_number(r.payments[i]), lower, upper});
        }
      }
      emit(table.str());
    } else {
      Json body;
      body["game"] = io::to_json(g);
      Json list = Json::array();
      for (const OperatorReport& r : reports) list.push_back(io::to_json(r));
      body["reports"] = std::move(list);
      emit_json("operators", std::move(body));
    }
    return kExitOk;
  }

  int cmd_audit() const {
    const auto ops = operators("shapley,banzhaf,theta,psi_bar");
    std::vector<Axiom> axioms;
    if (o_.axioms.empty()) {
      axioms.assign(all_axioms().begin(), all_axioms().end());
    } else {
      std::stringstream in(o_.axioms);
      for (std::string name; std::getline(in, name, ',');) {
        if (!name.empty()) axioms.push_back(parse_axiom(name));
      }
    }
    AuditSample sample;
    sample.seed = o_.seed;
    sample.tolerance = o_.tolerance;
    sample.op_config = op_config();
    if (o_.games_per_n >= 0) sample.random_games_per_n = o_.games_per_n;
    if (o_.max_n > 0) {
      sample.random_max_n = o_.max_n;
      sample.unanimity_max_n = std::max(o_.max_n, 1);
    }
    std::vector<std::pair<OperatorId, std::vector<AxiomAudit>>> results;
    for (OperatorId op : ops) {
      info("auditing " + std::string(to_string(op)));
      if (!o_.game.empty()) {
        const Game games[] = {load_game()};
        results.emplace_back(op, audit_games(op, axioms, games, sample));
      } else {
        results.emplace_back(op, audit(op, axioms, sample));
      }
    }
    if (format("json") == "csv") {
      io::CsvTable table({"operator", "axiom", "verdict", "games_checked", "violations", "witness"});
      for (const auto& [op, audits] : results) {
        for (const AxiomAudit& a : audits) {
          std::string witness = a.witness ? a.witness->description : "";
          for (char& ch : witness) {
            if (ch == ',' || ch == '\n') ch = ';';
          }
          table.add_row({std::string(to_string(op)), std::string(to_string(a.axiom)),
                         a.pass ? "pass" : "fail", std::to_string(a.games_checked),
                         std::to_string(a.violations), witness});
        }
      }
      emit(table.str());
    } else {
      Json list = Json::array();
      for (const auto& [op, audits] : results) {
        Json entry;
        entry["operator"] = to_string(op);
        Json verdicts = Json::array();
        for (const AxiomAudit& a : audits) verdicts.push_back(io::to_json(a));
        entry["axioms"] = std::move(verdicts);
        list.push_back(std::move(entry));
      }
      Json body;
      body["seed"] = o_.seed;
      body["audits"] = std::move(list);
      emit_json("audit", std::move(body));
    }
    return kExitOk;
  }

  int cmd_sybil_search() const {
    const Game g = load_game();
    const auto ops = operators("shapley");
    const int k_max = o_.k_max >= 0 ? o_.k_max : 3;
    const SybilAttackReport r = optimal_sybil_strategy(g, o_.player - 1, ops.front(),
                                                       parse_attack_family(o_.family), k_max);
    if (format("json") == "csv") {
      io::CsvTable table({"k", "payoff", "chain"});
      for (std::size_t k = 0; k < r.payoffs.size(); ++k) {
        std::string chain;
        for (const SybilStep& s : r.chains[k]) {
          if (!chain.empty()) chain += '>';
          chain += std::string(to_string(s.family)) + ":" + std::to_string(s.k);
        }
        table.add_row({std::to_string(k), io::format_number(r.payoffs[k]), chain});
      }
      emit(table.str());
    } else {
      emit_json("sybil-search", io::to_json(r));
    }
    return kExitOk;
  }

  PriorModel load_prior() const {
    if (o_.prior.empty()) throw ValidationError("--prior is required");
    Json j = io::read_json_file(o_.prior);
    if (o_.y_max >= 0) j["y_max"] = o_.y_max;
    return io::prior_from_json(j);
  }

  int cmd_prior_lp() const {
    const PriorModel prior = load_prior();
    const RebatePolicy p = solve_prior_optimal(prior);
    if (format("json") == "csv") {
      io::CsvTable table({"n", "p", "W", "X"});
      for (int n = 1; n <= prior.max_players(); ++n) {
        table.add_row({std::to_string(n), io::format_number(prior.mass(n)),
                       io::format_number(p.share(n)), io::format_number(p.per_identity(n))});
      }
      emit(table.str());
    } else {
      Json body = io::to_json(p);
      body["y_max"] = prior.y_max();
      body["prior_free_welfare"] = prior_free_welfare(prior);
      emit_json("prior-lp", std::move(body));
    }
    return kExitOk;
  }

  int cmd_prior_sweep() const {
    std::vector<int> support;
    std::stringstream in(o_.support);
    for (std::string tok; std::getline(in, tok, ',');) {
      try {
        support.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw ValidationError("--support: '" + tok + "' is not an integer");
      }
    }
    std::optional<int> y_max;
    if (o_.y_max >= 0) y_max = o_.y_max;
    const auto rows = sweep_priors(support, o_.step, y_max);
    info("swept " + std::to_string(rows.size()) + " priors");
    if (format("csv") == "csv") {
      emit(io::sweep_csv(support, rows).str());
    } else {
      Json list = Json::array();
      for (const SweepRow& r : rows) {
        list.push_back({{"p", r.p},
                        {"optimal_welfare", r.optimal_welfare},
                        {"prior_free_welfare", r.prior_free_welfare}});
      }
      Json body;
      body["support"] = support;
      body["rows"] = std::move(list);
      emit_json("prior-sweep", std::move(body));
    }
    return kExitOk;
  }

  TokenGraph load_graph() const {
    if (o_.graph.empty()) throw ValidationError("--graph is required");
    return io::graph_from_json(io::read_json_file(o_.graph));
  }

  int cmd_cfmm_game() const {
    const TokenGraph graph = load_graph();
    const Game g = graph_game(graph, o_.max_len);
    const CycleArbResult best = cyclic_arb(graph, o_.max_len);
    const auto ops = operators("shapley,banzhaf");
    if (format("json") == "csv") {
      io::CsvTable table({"coalition", "value"});
      for (Coalition s = 0; s < g.size(); ++s) {
        std::string label = format_coalition(s);
        for (char& ch : label) {
          if (ch == ',') ch = ' ';
        }
        table.add_row({label, io::format_number(g(s))});
      }
      emit(table.str());
    } else {
      Json body;
      body["game"] = io::to_json(g);
      body["best_cycle"] = io::to_json(best);
      Json reports = Json::array();
      for (OperatorId op : ops) reports.push_back(io::to_json(report(op, g, op_config())));
      body["reports"] = std::move(reports);
      emit_json("cfmm-game", std::move(body));
    }
    return kExitOk;
  }

  int cmd_cfmm_attack() const {
    const TokenGraph graph = load_graph();
    const auto ops = operators("shapley,banzhaf");
    Json list = Json::array();
    io::CsvTable table({"operator", "owner", "before_payoff", "after_payoff", "profitable"});
    for (OperatorId op : ops) {
      const TokenSplitReport r = token_split_attack(graph, o_.pool - 1, op, o_.max_len, op_config());
      list.push_back(io::to_json(r));
      table.add_row({std::string(to_string(op)), std::to_string(r.owner + 1),
                     io::format_number(r.before_payoff), io::format_number(r.after_payoff),
                     r.profitable() ? "true" : "false"});
    }
    if (format("json") == "csv") {
      emit(table.str());
    } else {
      Json body;
      body["pool"] = o_.pool;
      body["attacks"] = std::move(list);
      emit_json("cfmm-attack", std::move(body));
    }
    return kExitOk;
  }

  ThresholdRule rule() const {
    if (o_.rule == "clamped") return ThresholdRule::kClamped;
    if (o_.rule == "signed") return ThresholdRule::kSigned;
    throw ValidationError("--rule must be clamped or signed");
  }

  int cmd_auction() const {
    if (o_.auction.empty()) throw ValidationError("--auction is required");
    AuctionInstance inst = io::auction_from_json(io::read_json_file(o_.auction));
    const Mechanism m = parse_mechanism(o_.mechanism);
    AuctionOptions options;
    options.rule = rule();
    if (!o_.ops.empty()) {
      const Outcome outcome = tau_mechanism(inst, operators("").front(), op_config());
      emit_json("auction", {{"mechanism", "tau"}, {"outcome", io::to_json(outcome)}});
      return kExitOk;
    }
    const Outcome outcome = run_mechanism(inst, m, options);
    if (format("json") == "csv") {
      io::CsvTable table({"bundle", "bid", "allocated", "payment"});
      for (int i = 0; i < inst.size(); ++i) {
        table.add_row({std::to_string(i + 1), io::format_number(inst.bids[i]),
                       contains(outcome.allocation, i) ? "1" : "0",
                       io::format_number(outcome.payments[i])});
      }
      emit(table.str());
    } else {
      emit_json("auction", {{"mechanism", to_string(m)}, {"outcome", io::to_json(outcome)}});
    }
    return kExitOk;
  }

  int cmd_scenario() const {
    const std::string& name = o_.scenario;
    if (name == "sybil-split") {
      const SybilSplitReport r = sybil_split_scenario(o_.epsilon, parse_mechanism(o_.mechanism), o_.seed);
      emit_json("scenario/sybil-split", io::to_json(r));
    } else if (name == "negative-result") {
      emit_json("scenario/negative-result", io::to_json(negative_result_scenario(o_.scale)));
    } else if (name == "non-comparability") {
      emit_json("scenario/non-comparability", io::to_json(non_comparability()));
    } else if (name == "trilemma") {
      AuditSample sample = trilemma_sample();
      sample.seed = o_.seed;
      Json rows = Json::array();
      for (const TrilemmaRow& r : trilemma_demo(sample)) rows.push_back(io::to_json(r));
      emit_json("scenario/trilemma", {{"rows", std::move(rows)}});
    } else if (name == "token-d") {
      const TokenGraph graph = o_.graph.empty() ? triangle_graph() : load_graph();
      if (o_.pool < 1 || o_.pool > static_cast<int>(graph.pools.size())) {
        throw ValidationError("--pool must lie in 1.." + std::to_string(graph.pools.size()));
      }
      const int owner = graph.pools[o_.pool - 1].owner;
      const Game g = graph_game(graph, o_.max_len);
      Json attacks = Json::array();
      for (OperatorId op : operators("shapley,banzhaf")) {
        Json entry;
        entry["idealized"] = io::to_json(idealized_token_split(g, owner, op));
        entry["pool_level"] = io::to_json(token_split_attack(graph, o_.pool - 1, op, o_.max_len));
        attacks.push_back(std::move(entry));
      }
      emit_json("scenario/token-d", {{"graph", io::to_json(graph)}, {"attacks", std::move(attacks)}});
    } else {
      throw ValidationError("unknown scenario '" + name +
                            "' (expected sybil-split|negative-result|non-comparability|trilemma|token-d)");
    }
    return kExitOk;
  }

  int cmd_regression_check() const {
    const auto results = published_regressions();
    int failed = 0;
    std::ostringstream table;
    for (const RegressionResult& r : results) {
      table << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail << "]\n";
      failed += r.pass ? 0 : 1;
    }
    table << results.size() - failed << "/" << results.size() << " regressions passed\n";
    emit(table.str());
    return failed == 0 ? kExitOk : kExitInternal;
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  LogLevel level_;
};

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format: json or csv");
  cmd->add_option("--out", o.out, "Output file (default stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rebate operators, Sybil audits, prior LPs, CFMM games and block-space auctions"};
  app.name("mevr");
  app.require_subcommand(1);

  auto* ops = app.add_subcommand("operators", "Evaluate value operators on a game");
  ops->add_option("--game", o.game, "Game JSON")->required();
  ops->add_option("--op", o.ops, "Comma-separated operators");
  ops->add_option("--k-max", o.k_max, "Identities searched by psi");
  add_format(ops, o);

  auto* aud = app.add_subcommand("audit", "Audit operators against axioms");
  aud->add_option("--op", o.ops, "Comma-separated operators");
  aud->add_option("--axioms", o.axioms, "Comma-separated axioms (default all)");
  aud->add_option("--game", o.game, "Audit a single game instead of the sample");
  aud->add_option("--seed", o.seed, "Sample seed");
  aud->add_option("--k-max", o.k_max, "Identities searched by psi");
  aud->add_option("--games-per-n", o.games_per_n, "Random games per player count");
  aud->add_option("--max-n", o.max_n, "Largest player count in the sample");
  aud->add_option("--tol", o.tolerance, "Comparison tolerance");
  add_format(aud, o);

  auto* syb = app.add_subcommand("sybil-search", "Best Sybil strategy for one player");
  syb->add_option("--game", o.game, "Game JSON")->required();
  syb->add_option("--player", o.player, "1-based player");
  syb->add_option("--op", o.ops, "Operator");
  syb->add_option("--family", o.family, "copy, split or mixed");
  syb->add_option("--k-max", o.k_max, "Largest number of added identities");
  add_format(syb, o);

  auto* plp = app.add_subcommand("prior-lp", "Solve the prior-optimal rebate LP");
  plp->add_option("--prior", o.prior, "Prior JSON")->required();
  plp->add_option("--y-max", o.y_max, "Largest Sybil deviation index");
  add_format(plp, o);

  auto* psw = app.add_subcommand("prior-sweep", "Sweep priors over a simplex grid");
  psw->add_option("--support", o.support, "Comma-separated player counts");
  psw->add_option("--step", o.step, "Grid step");
  psw->add_option("--y-max", o.y_max, "Largest Sybil deviation index");
  add_format(psw, o);

  auto* cg = app.add_subcommand("cfmm-game", "Build the cyclic-arbitrage game of a token graph");
  cg->add_option("--graph", o.graph, "Token graph JSON")->required();
  cg->add_option("--max-len", o.max_len, "Longest cycle");
  cg->add_option("--op", o.ops, "Operators to report");
  add_format(cg, o);

  auto* ca = app.add_subcommand("cfmm-attack", "Split a pool through a fresh token");
  ca->add_option("--graph", o.graph, "Token graph JSON")->required();
  ca->add_option("--pool", o.pool, "1-based pool index");
  ca->add_option("--max-len", o.max_len, "Longest cycle");
  ca->add_option("--op", o.ops, "Operators to compare");
  add_format(ca, o);

  auto* auc = app.add_subcommand("auction", "Run a block-space auction");
  auc->add_option("--auction", o.auction, "Auction JSON")->required();
  auc->add_option("--mechanism", o.mechanism, "myerson, mev_max or pay_your_bid");
  auc->add_option("--rule", o.rule, "Threshold rule: clamped or signed");
  auc->add_option("--op", o.ops, "Run the tau mechanism with this operator instead");
  add_format(auc, o);

  auto* sc = app.add_subcommand("scenario", "Run a built-in counterexample");
  sc->add_option("--name", o.scenario, "sybil-split, negative-result, non-comparability, trilemma, token-d")
      ->required();
  sc->add_option("--epsilon", o.epsilon, "Bid gap in sybil-split");
  sc->add_option("--scale", o.scale, "Complementary value in negative-result");
  sc->add_option("--mechanism", o.mechanism, "Mechanism for sybil-split");
  sc->add_option("--graph", o.graph, "Token graph for token-d (default: triangle)");
  sc->add_option("--pool", o.pool, "1-based pool to split in token-d");
  sc->add_option("--max-len", o.max_len, "Longest cycle");
  sc->add_option("--op", o.ops, "Operators for token-d");
  sc->add_option("--seed", o.seed, "Seed");
  add_format(sc, o);

  auto* pc = app.add_subcommand("paper-check", "Re-derive the published examples");
  pc->add_option("--out", o.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << " (run with --help for usage)\n";
    return kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Runner runner(o, out, err);
  try {
    return runner.run(command);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, std::cout, std::cerr);
}

}  // namespace mevr::cli
