#pragma once

// CSV input and JSON / CSV output. Reading errors throw DataError carrying
// the 1-based line number of the offending row.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "active/adaptive.hpp"
#include "active/density.hpp"
#include "active/mt_procedures.hpp"
#include "active/proximal_2sls.hpp"
#include "active/sim_harness.hpp"

namespace active::io {

using Json = nlohmann::ordered_json;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row

  // Index of a header column, or nullopt. Matching ignores case.
  std::optional<std::size_t> column(const std::string& name) const;
  std::size_t require_column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

// Comma separated, header row required, blank lines skipped, no quoting.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& source = "<input>");

double parse_number(const std::string& field, std::size_t line);

// Columns id, proxy and optionally true.
struct StatsInput {
  std::vector<std::string> ids;
  std::vector<double> proxy;
  std::optional<std::vector<double>> truth;
};
StatsInput read_stats_csv(const std::filesystem::path& path);

// Two numeric columns (proxy, true), or (q, p).
std::vector<MixturePair> read_pairs_csv(const std::filesystem::path& path);

// A single numeric column: the first column named q, proxy or value, else the first.
std::vector<double> read_values_csv(const std::filesystem::path& path);

// Wide format: y, a, z1..zd, w1..wd.
PanelData read_panel_csv(const std::filesystem::path& path);
void write_panel_csv(const std::filesystem::path& path, const PanelData& data);

struct NamedPanel {
  std::string id;
  PanelData data;
};

// A file holds one wide-format hypothesis. A directory holds either the four
// block files y.csv, a.csv, z.csv, w.csv (one hypothesis) or any number of
// wide-format *.csv files, taken in filename order with the stem as id.
std::vector<NamedPanel> read_panels(const std::filesystem::path& path);

Json to_json(const DiscoverySet& ds, const StatVector& stats, const std::vector<bool>& query_mask);
Json to_json(const TrialReport& report);
Json to_json(const FdrStudyResult& result);
Json to_json(const JointCorrectionReport& report);
Json to_json(const TuneResult& result);
Json to_json(const GridDensity& density);
Json to_json(const CondCdfEstimate& estimate);
GridDensity grid_density_from_json(const Json& j);
CondCdfEstimate cond_cdf_from_json(const Json& j);

// Tidy rows: study,method,condition,metric,x,value.
std::string to_csv(const TrialReport& report);

// JSON for nonfinite doubles is null.
Json number_or_null(double x);

std::string dump(const Json& j);  // pretty, trailing newline
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

}  // namespace active::io
