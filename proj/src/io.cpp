#include "active/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "active/error.hpp"

namespace active::io {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Eigen::MatrixXd numeric_matrix(const CsvTable& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.number(r, c);
    }
  }
  return m;
}

PanelData read_block_files(const fs::path& dir) {
  auto load = [&](const char* name) { return numeric_matrix(read_csv(dir / name)); };
  const Eigen::MatrixXd y = load("y.csv"), a = load("a.csv"), z = load("z.csv"), w = load("w.csv");
  if (y.cols() != 1 || a.cols() != 1) throw DataError("y.csv and a.csv must have exactly one column");
  if (y.rows() != a.rows() || y.rows() != z.rows() || y.rows() != w.rows()) {
    throw DataError("block files in " + dir.string() + " have different row counts");
  }
  PanelData p;
  p.y = y.col(0);
  p.a = a.col(0);
  p.z = z;
  p.w = w;
  return p;
}

void check_binary(const PanelData& p, const CsvTable* t) {
  for (Eigen::Index i = 0; i < p.a.size(); ++i) {
    if (p.a(i) != 0.0 && p.a(i) != 1.0) {
      throw DataError("treatment column a must be 0 or 1", t ? t->lines[static_cast<std::size_t>(i)] : 0);
    }
  }
}

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  const std::string want = lower(name);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (lower(header[c]) == want) return c;
  }
  return std::nullopt;
}

std::size_t CsvTable::require_column(const std::string& name) const {
  const auto c = column(name);
  if (!c) throw DataError("missing required column '" + name + "'", 1);
  return *c;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  return parse_number(rows.at(row).at(col), lines.at(row));
}

double parse_number(const std::string& field, std::size_t line) {
  const std::string s = trim(field);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw DataError("cannot parse '" + s + "' as a number", line);
  }
  if (std::isnan(v)) throw DataError("NaN is not allowed", line);
  return v;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(source + ": expected " + std::to_string(t.header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      lineno);
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (!have_header) throw DataError(source + ": file is empty");
  return t;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

StatsInput read_stats_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t id_col = t.require_column("id");
  const std::size_t proxy_col = t.require_column("proxy");
  const auto true_col = t.column("true");
  if (t.rows.empty()) throw DataError(path.string() + " has no data rows");
  StatsInput in;
  if (true_col) in.truth.emplace();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][id_col].empty()) throw DataError("empty id", t.lines[r]);
    in.ids.push_back(t.rows[r][id_col]);
    in.proxy.push_back(t.number(r, proxy_col));
    if (true_col) in.truth->push_back(t.number(r, *true_col));
  }
  return in;
}

std::vector<MixturePair> read_pairs_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  std::size_t a = 0, b = 1;
  if (auto c1 = t.column("proxy"), c2 = t.column("true"); c1 && c2) {
    a = *c1;
    b = *c2;
  } else if (auto q = t.column("q"), p = t.column("p"); q && p) {
    a = *q;
    b = *p;
  } else if (t.header.size() < 2) {
    throw DataError(path.string() + " needs two columns (proxy,true)", 1);
  }
  if (t.rows.empty()) throw DataError(path.string() + " has no data rows");
  std::vector<MixturePair> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double x = t.number(r, a), y = t.number(r, b);
    if (x < 0.0 || y < 0.0) throw DataError("statistics must be nonnegative", t.lines[r]);
    out.push_back({x, y});
  }
  return out;
}

std::vector<double> read_values_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  std::size_t col = 0;
  for (const char* name : {"q", "proxy", "value"}) {
    if (auto c = t.column(name)) {
      col = *c;
      break;
    }
  }
  std::vector<double> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) out.push_back(t.number(r, col));
  if (out.empty()) throw DataError(path.string() + " has no data rows");
  return out;
}

PanelData read_panel_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t yc = t.require_column("y"), ac = t.require_column("a");
  std::vector<std::size_t> zc, wc;
  for (std::size_t j = 1;; ++j) {
    const auto z = t.column("z" + std::to_string(j));
    const auto w = t.column("w" + std::to_string(j));
    if (!z && !w) break;
    if (!z || !w) throw DataError(path.string() + ": z" + std::to_string(j) + " and w" +
                                      std::to_string(j) + " must both be present", 1);
    zc.push_back(*z);
    wc.push_back(*w);
  }
  if (zc.empty()) throw DataError(path.string() + ": need columns z1..zd and w1..wd", 1);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto d = static_cast<Eigen::Index>(zc.size());
  PanelData p;
  p.y.resize(n);
  p.a.resize(n);
  p.z.resize(n, d);
  p.w.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    p.y(i) = t.number(r, yc);
    p.a(i) = t.number(r, ac);
    for (Eigen::Index j = 0; j < d; ++j) {
      p.z(i, j) = t.number(r, zc[static_cast<std::size_t>(j)]);
      p.w(i, j) = t.number(r, wc[static_cast<std::size_t>(j)]);
    }
  }
  check_binary(p, &t);
  return p;
}

void write_panel_csv(const fs::path& path, const PanelData& p) {
  std::ostringstream os;
  os << "y,a";
  for (Eigen::Index j = 0; j < p.d(); ++j) os << ",z" << j + 1;
  for (Eigen::Index j = 0; j < p.d(); ++j) os << ",w" << j + 1;
  os << '\n';
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    os << format_double(p.y(i)) << ',' << format_double(p.a(i));
    for (Eigen::Index j = 0; j < p.d(); ++j) os << ',' << format_double(p.z(i, j));
    for (Eigen::Index j = 0; j < p.d(); ++j) os << ',' << format_double(p.w(i, j));
    os << '\n';
  }
  write_text(path, os.str());
}

std::vector<NamedPanel> read_panels(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {{path.stem().string(), read_panel_csv(path)}};
  if (fs::exists(path / "y.csv") && fs::exists(path / "a.csv")) {
    PanelData p = read_block_files(path);
    check_binary(p, nullptr);
    return {{path.filename().string(), std::move(p)}};
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no .csv files in " + path.string());
  std::vector<NamedPanel> out;
  for (const auto& f : files) out.push_back({f.stem().string(), read_panel_csv(f)});
  return out;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const DiscoverySet& ds, const StatVector& stats, const std::vector<bool>& query_mask) {
  Json j;
  j["alpha"] = ds.alpha;
  j["k_star"] = ds.k_star;
  j["threshold"] = number_or_null(ds.threshold);
  Json ids = Json::array();
  for (std::size_t i : ds.rejected) ids.push_back(stats.id(i));
  j["rejected_ids"] = ids;
  Json mask = Json::array();
  std::size_t count = 0;
  for (bool q : query_mask) {
    mask.push_back(q);
    count += q;
  }
  j["query_mask"] = mask;
  j["query_count"] = count;
  return j;
}

Json to_json(const TrialReport& r) {
  Json j;
  j["study"] = r.study;
  j["trials"] = r.trials;
  j["level"] = r.level;
  Json params;
  for (const auto& [k, v] : r.parameters) params[k] = number_or_null(v);
  j["parameters"] = params;
  j["grid"] = r.grid;
  Json methods = Json::array();
  for (const auto& m : r.methods) {
    Json mj;
    mj["method"] = m.method;
    mj["condition"] = m.condition;
    mj["samples"] = m.samples;
    mj["ks"] = m.ks;
    mj["max_excess_over_uniform"] = m.max_excess;
    mj["reject_rate"] = m.reject_rate;
    mj["reject_se"] = m.reject_se;
    if (m.has_queries) {
      mj["query_freq"] = m.query_freq;
      mj["query_se"] = m.query_se;
    }
    mj["ecdf"] = m.ecdf;
    methods.push_back(mj);
  }
  j["methods"] = methods;
  // Headline numbers for the Beta study.
  if (r.study == "beta") {
    for (const auto& m : r.methods) {
      if (m.method == "ind-known" && m.condition == "null") j["false_positive_rate"] = m.reject_rate;
      if (m.method == "ind-estimated" && m.condition == "null") {
        j["false_positive_rate_estimated"] = m.reject_rate;
      }
    }
  }
  return j;
}

Json to_json(const FdrStudyResult& r) {
  Json j;
  j["trials"] = r.trials;
  j["fdr"] = r.fdr;
  j["fdr_se"] = r.fdr_se;
  j["power"] = r.power;
  j["power_se"] = r.power_se;
  j["query_fraction"] = r.query_fraction;
  return j;
}

Json to_json(const JointCorrectionReport& r) {
  Json j;
  j["rho"] = r.rho;
  j["gamma"] = r.gamma;
  j["n_fit"] = r.n_fit;
  j["n_eval"] = r.n_eval;
  j["q_bins"] = r.q_bins;
  j["ks"] = r.ks;
  j["ks_band"] = r.band;
  j["query_freq"] = r.query_freq;
  j["grid"] = r.grid;
  j["ecdf"] = r.ecdf;
  return j;
}

Json to_json(const TuneResult& r) {
  Json j;
  j["gamma_star"] = r.gamma;
  j["objective"] = r.objective == kLogSentinel ? Json(nullptr) : Json(r.objective);
  j["usage"] = r.usage;
  j["feasible"] = r.feasible;
  return j;
}

Json to_json(const GridDensity& d) {
  Json j;
  j["type"] = "grid_density";
  j["bin_edges"] = d.bin_edges;
  j["bin_values"] = d.bin_values;
  return j;
}

Json to_json(const CondCdfEstimate& e) {
  Json j;
  j["type"] = "conditional_cdf";
  j["q_bin_edges"] = e.q_bin_edges;
  j["p_grid"] = e.p_grid;
  j["cdf"] = e.cdf;
  return j;
}

GridDensity grid_density_from_json(const Json& j) {
  try {
    GridDensity d;
    d.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    d.bin_values = j.at("bin_values").get<std::vector<double>>();
    if (d.bin_edges.size() != d.bin_values.size() + 1 || d.bin_values.empty()) {
      throw DataError("grid density needs one more edge than values");
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed grid density JSON: ") + e.what());
  }
}

CondCdfEstimate cond_cdf_from_json(const Json& j) {
  try {
    CondCdfEstimate e;
    e.q_bin_edges = j.at("q_bin_edges").get<std::vector<double>>();
    e.p_grid = j.at("p_grid").get<std::vector<double>>();
    e.cdf = j.at("cdf").get<std::vector<std::vector<double>>>();
    if (e.q_bin_edges.size() != e.cdf.size() + 1 || e.cdf.empty() || e.p_grid.size() < 2) {
      throw DataError("conditional CDF JSON has inconsistent sizes");
    }
    for (const auto& row : e.cdf) {
      if (row.size() != e.p_grid.size()) throw DataError("conditional CDF row length differs from p grid");
      if (!std::is_sorted(row.begin(), row.end())) throw DataError("conditional CDF row is not monotone");
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed conditional CDF JSON: ") + ex.what());
  }
}

std::string to_csv(const TrialReport& r) {
  std::ostringstream os;
  os << "study,method,condition,metric,x,value\n";
  for (const auto& m : r.methods) {
    const std::string prefix = r.study + ',' + m.method + ',' + m.condition + ',';
    for (std::size_t k = 0; k < r.grid.size(); ++k) {
      os << prefix << "ecdf," << format_double(r.grid[k]) << ',' << format_double(m.ecdf[k]) << '\n';
    }
    os << prefix << "ks,," << format_double(m.ks) << '\n';
    os << prefix << "max_excess_over_uniform,," << format_double(m.max_excess) << '\n';
    os << prefix << "reject_rate," << format_double(r.level) << ',' << format_double(m.reject_rate) << '\n';
    if (m.has_queries) os << prefix << "query_freq,," << format_double(m.query_freq) << '\n';
  }
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace active::io
