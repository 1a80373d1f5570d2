#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mevr/auctions.hpp"
#include "mevr/audit.hpp"
#include "mevr/cfmm.hpp"
#include "mevr/game.hpp"
#include "mevr/operators.hpp"
#include "mevr/prior.hpp"
#include "mevr/sybil.hpp"

// JSON and CSV in the external formats. Every index written to a file is
// 1-based; the library itself is 0-based.
namespace mevr::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Parses a file; unreadable files and syntax errors become ValidationError.
Json read_json_file(const std::filesystem::path& path);
Json parse_json(std::string_view text);

/// {"n": 3, "values": [v(0), v(1), ...], "monotone": true} with values indexed
/// by coalition bitmask, or {"n": 3, "unanimity": [1, 2], "scale": 2.0}.
Game game_from_json(const Json& j);
Json to_json(const Game& g);

/// {"p": {"3": 0.2, "4": 0.8}, "y_max": 10}
PriorModel prior_from_json(const Json& j);

/// {"numeraire": "A", "pools": [{"pair": ["A","B"], "reserves": [x, y],
/// "kind": "cp"|"wg", "weight": 0.3, "owner": 1}, ...]}
TokenGraph graph_from_json(const Json& j);
Json to_json(const TokenGraph& g);

/// {"bids": [...], "conflicts": [[1,2], ...] | "feasible_maximal": [[1,3], ...],
/// "oracle": <game>, "seed": 42}. A missing oracle is the zero game.
AuctionInstance auction_from_json(const Json& j);

Json coalition_json(Coalition s);
Json to_json(const SybilExtension& ext);
Json to_json(const OperatorReport& r);
Json to_json(const AxiomAudit& a);
Json to_json(const SybilAttackReport& r);
Json to_json(const RebatePolicy& p);
Json to_json(const Outcome& o);
Json to_json(const CycleArbResult& r);
Json to_json(const TokenSplitReport& r);
Json to_json(const ProbeReport& r);
Json to_json(const SybilSplitReport& r);
Json to_json(const NegativeResultReport& r);
Json to_json(const NonComparabilityReport& r);
Json to_json(const TrilemmaRow& r);

/// Adds the schema version ahead of the report's own fields.
Json envelope(std::string_view kind, Json body);

/// Shortest decimal that round-trips.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable sweep_csv(std::span<const int> support, std::span<const SweepRow> rows);

/// Writes to `path`, or to stdout when the path is empty or "-".
void write_output(const std::string& path, std::string_view content);

}  // namespace mevr::io
