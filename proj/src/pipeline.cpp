#include "epicurve/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epicurve/cluster_fuse.hpp"
#include "epicurve/curve_features.hpp"
#include "epicurve/errors.hpp"
#include "epicurve/feature_table.hpp"
#include "epicurve/infotheory.hpp"
#include "epicurve/major_factor.hpp"
#include "text.hpp"

namespace epicurve {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kMetadataFields = {"region", "status", "age_group", "city_code", "district_letter"};

bool is_metadata_field(const std::string& name) {
  return std::find(kMetadataFields.begin(), kMetadataFields.end(), name) != kMetadataFields.end();
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

FeatureOptions feature_options(const PipelineConfig& config) {
  FeatureOptions opts;
  std::vector<double> grid = config.alpha_grid;
  std::sort(grid.begin(), grid.end());
  opts.center_alpha = grid.front();
  opts.span_alphas.assign(grid.rbegin(), grid.rend() - 1);
  return opts;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || item.key() == key;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  return get_or<T>(j, key, T{});
}

Date date_field(const json& j, const char* key, Date fallback) {
  if (!j.contains(key)) return fallback;
  auto text = get_or<std::string>(j, key, "");
  auto d = parse_iso_date(text);
  if (!d) throw ConfigError("bad date '" + text + "' for '" + key + "'");
  return *d;
}

fs::path resolve(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

void check_name(const std::string& name, const std::string& what) {
  if (name.empty()) throw ConfigError(what + " name must not be empty");
  if (name.find_first_of("_,/\\ ") != std::string::npos) {
    throw ConfigError(what + " name '" + name + "' may not contain '_', ',', '/', '\\' or spaces");
  }
}

// Categorical columns available to scans once features and fusions exist.
std::vector<std::string> scan_columns(const PipelineConfig& config) {
  auto cols = discretized_columns(config);
  for (const auto& f : config.fusions) cols.push_back(f.name);
  return cols;
}

std::vector<std::string> candidates_for(const PipelineConfig& config, const ResponseSpec& spec) {
  std::vector<std::string> cands = spec.candidates.empty() ? scan_columns(config) : spec.candidates;
  std::vector<std::string> out;
  for (const auto& c : cands) {
    if (c == spec.response || contains(spec.exclude, c)) continue;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<std::string> discretized_columns(const PipelineConfig& config) {
  return feature_csv_columns(feature_options(config));
}

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"cases", "metadata", "window", "rate_scale", "alpha_grid", "n_bins", "network_thresholds",
              "association_features", "fusions", "responses", "clusterings", "output_dir", "top", "bottom"});
  PipelineConfig c;
  c.cases = resolve(require<std::string>(j, "cases", "config"), base_dir);
  c.metadata = resolve(require<std::string>(j, "metadata", "config"), base_dir);
  if (j.contains("window")) {
    const json& w = j.at("window");
    check_keys(w, "window", {"start", "end"});
    c.window.start = date_field(w, "start", c.window.start);
    c.window.end = date_field(w, "end", c.window.end);
  }
  c.rate_scale = get_or(j, "rate_scale", c.rate_scale);
  c.alpha_grid = get_or(j, "alpha_grid", c.alpha_grid);
  c.n_bins = get_or(j, "n_bins", c.n_bins);
  c.network_thresholds = get_or(j, "network_thresholds", c.network_thresholds);
  c.association_features = get_or(j, "association_features", c.association_features);
  c.output_dir = resolve(get_or<std::string>(j, "output_dir", "out"), base_dir);
  c.top = get_or(j, "top", c.top);
  c.bottom = get_or(j, "bottom", c.bottom);

  for (const auto& f : get_or(j, "fusions", json::array())) {
    check_keys(f, "fusion", {"name", "columns", "k", "seed", "restarts"});
    FusionSpec s;
    s.name = require<std::string>(f, "name", "fusion");
    s.columns = require<std::vector<std::string>>(f, "columns", "fusion " + s.name);
    s.k = get_or(f, "k", s.k);
    s.seed = get_or(f, "seed", s.seed);
    s.restarts = get_or(f, "restarts", s.restarts);
    c.fusions.push_back(std::move(s));
  }
  for (const auto& r : get_or(j, "responses", json::array())) {
    check_keys(r, "response", {"name", "response", "candidates", "exclude", "order", "replicates", "seed"});
    ResponseSpec s;
    s.response = require<std::string>(r, "response", "response");
    s.name = get_or(r, "name", s.response);
    s.candidates = get_or(r, "candidates", s.candidates);
    s.exclude = get_or(r, "exclude", s.exclude);
    s.order = get_or(r, "order", s.order);
    s.replicates = get_or(r, "replicates", s.replicates);
    s.seed = get_or(r, "seed", s.seed);
    c.responses.push_back(std::move(s));
  }
  for (const auto& h : get_or(j, "clusterings", json::array())) {
    check_keys(h, "clustering", {"name", "columns", "standardize"});
    ClusteringSpec s;
    s.name = require<std::string>(h, "name", "clustering");
    s.columns = require<std::vector<std::string>>(h, "columns", "clustering " + s.name);
    s.standardize = get_or(h, "standardize", s.standardize);
    c.clusterings.push_back(std::move(s));
  }
  validate_config(c);
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.parent_path());
}

std::string serialize_config(const PipelineConfig& c) {
  json j;
  j["cases"] = c.cases.generic_string();
  j["metadata"] = c.metadata.generic_string();
  j["window"] = {{"start", format_iso_date(c.window.start)}, {"end", format_iso_date(c.window.end)}};
  j["rate_scale"] = c.rate_scale;
  j["alpha_grid"] = c.alpha_grid;
  j["n_bins"] = c.n_bins;
  j["network_thresholds"] = c.network_thresholds;
  j["association_features"] = c.association_features;
  j["output_dir"] = c.output_dir.generic_string();
  j["top"] = c.top;
  j["bottom"] = c.bottom;
  j["fusions"] = json::array();
  for (const auto& f : c.fusions) {
    j["fusions"].push_back({{"name", f.name}, {"columns", f.columns}, {"k", f.k}, {"seed", f.seed},
                            {"restarts", f.restarts}});
  }
  j["responses"] = json::array();
  for (const auto& r : c.responses) {
    j["responses"].push_back({{"name", r.name}, {"response", r.response}, {"candidates", r.candidates},
                              {"exclude", r.exclude}, {"order", r.order}, {"replicates", r.replicates},
                              {"seed", r.seed}});
  }
  j["clusterings"] = json::array();
  for (const auto& h : c.clusterings) {
    j["clusterings"].push_back({{"name", h.name}, {"columns", h.columns}, {"standardize", h.standardize}});
  }
  return j.dump(2) + "\n";
}

void validate_config(const PipelineConfig& c) {
  if (!(c.window.start < c.window.end)) throw ConfigError("window start must precede window end");
  if (!(c.rate_scale > 0.0)) throw ConfigError("rate_scale must be positive");
  if (c.alpha_grid.size() < 2) throw ConfigError("alpha_grid needs at least 2 levels");
  {
    auto grid = c.alpha_grid;
    std::sort(grid.begin(), grid.end());
    if (std::adjacent_find(grid.begin(), grid.end()) != grid.end()) throw ConfigError("alpha_grid has duplicates");
    for (double a : grid)
      if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha_grid levels must lie in (0, 1)");
  }
  if (c.n_bins < 2) throw ConfigError("n_bins must be at least 2");
  for (double t : c.network_thresholds)
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("network thresholds must lie in [0, 1]");
  if (c.top < 0 || c.bottom < 0) throw ConfigError("top and bottom must be non-negative");

  const auto feature_cols = discretized_columns(c);
  const auto shape = shape_feature_names(feature_options(c));
  auto require_feature = [&](const std::string& col, const std::string& where) {
    if (!contains(feature_cols, col)) throw ConfigError("unknown column '" + col + "' in " + where);
  };
  for (const auto& f : c.association_features) require_feature(f, "association_features");
  if (!c.association_features.empty() && c.association_features.size() < 2) {
    throw ConfigError("association_features needs at least 2 columns");
  }

  std::set<std::string> fusion_names;
  for (const auto& f : c.fusions) {
    check_name(f.name, "fusion");
    if (contains(feature_cols, f.name) || is_metadata_field(f.name)) {
      throw ConfigError("fusion name '" + f.name + "' collides with an existing column");
    }
    if (!fusion_names.insert(f.name).second) throw ConfigError("duplicate fusion '" + f.name + "'");
    if (f.columns.empty()) throw ConfigError("fusion " + f.name + " has no columns");
    for (const auto& col : f.columns) require_feature(col, "fusion " + f.name);
    if (f.k < 1) throw ConfigError("fusion " + f.name + ": k must be at least 1");
    if (f.restarts < 1) throw ConfigError("fusion " + f.name + ": restarts must be at least 1");
  }

  const auto scan_cols = scan_columns(c);
  std::set<std::string> response_names;
  for (const auto& r : c.responses) {
    check_name(r.name, "response");
    if (!response_names.insert(r.name).second) throw ConfigError("duplicate response '" + r.name + "'");
    if (!contains(scan_cols, r.response) && !is_metadata_field(r.response)) {
      throw ConfigError("unknown column '" + r.response + "' in response " + r.name);
    }
    for (const auto& col : r.candidates) {
      if (!contains(scan_cols, col)) throw ConfigError("unknown column '" + col + "' in response " + r.name);
    }
    for (const auto& col : r.exclude) {
      if (!contains(scan_cols, col)) throw ConfigError("unknown column '" + col + "' in response " + r.name);
    }
    if (r.order < 1 || r.order > kMaxScanOrder) {
      throw ConfigError("response " + r.name + ": order must be between 1 and " + std::to_string(kMaxScanOrder));
    }
    if (r.replicates < 1) throw ConfigError("response " + r.name + ": replicates must be at least 1");
    if (candidates_for(c, r).size() < static_cast<std::size_t>(r.order)) {
      throw ConfigError("response " + r.name + " has fewer candidates than its scan order");
    }
  }

  std::set<std::string> clustering_names;
  for (const auto& h : c.clusterings) {
    check_name(h.name, "clustering");
    if (!clustering_names.insert(h.name).second) throw ConfigError("duplicate clustering '" + h.name + "'");
    if (h.columns.empty()) throw ConfigError("clustering " + h.name + " has no columns");
    for (const auto& col : h.columns) require_feature(col, "clustering " + h.name);
  }
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Features: return "features";
    case Stage::Associate: return "associate";
    case Stage::Fuse: return "fuse";
    case Stage::Select: return "select";
    case Stage::Cluster: return "cluster";
    case Stage::Report: return "report";
  }
  return "";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : {Stage::Features, Stage::Associate, Stage::Fuse, Stage::Select, Stage::Cluster, Stage::Report}) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kFeaturesFile = "features.csv";
constexpr const char* kFusedFile = "features_fused.csv";

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream out;
  fn(out);
  write_file(path, out.str());
}

fs::path upstream(const PipelineConfig& c, const char* file, Stage producer) {
  fs::path p = c.output_dir / file;
  if (!fs::exists(p)) {
    throw ConfigError("missing " + p.string() + ": run `" + std::string(stage_name(producer)) + "` first");
  }
  return p;
}

void warn(std::ostream& log, const std::string& message) { log << "warning: " << message << '\n'; }

void run_features(const PipelineConfig& c, std::ostream& log) {
  const auto cases = parse_case_series(c.cases);
  const auto meta = parse_unit_metadata(c.metadata);
  const FeatureOptions opts = feature_options(c);

  FeatureTable table;
  table.names = feature_csv_columns(opts);
  table.columns.resize(table.names.size());
  for (const auto& [unit, series] : cases) {
    auto m = meta.find(unit);
    if (m == meta.end()) throw DataError("no metadata for unit " + unit);
    const auto rates = window_clip(compute_daily_rates(series, m->second, c.rate_scale), c.window.start, c.window.end);
    const auto smoothed = smooth(rates);
    const auto f = extract_features(smoothed, opts);
    for (const auto& w : f.warnings) warn(log, w);

    auto as_real = [](const std::optional<std::int64_t>& v) -> std::optional<double> {
      if (!v) return std::nullopt;
      return static_cast<double>(*v);
    };
    std::vector<std::optional<double>> row;
    const Date peak_date = smoothed.start_date + std::chrono::days{static_cast<int>(f.peakdate)};
    row.push_back(static_cast<double>(peak_date.time_since_epoch().count()));
    row.push_back(f.peakvalue);
    row.push_back(as_real(f.peak));
    row.push_back(as_real(f.curvature));
    for (const auto& v : f.left) row.push_back(as_real(v));
    for (const auto& v : f.right) row.push_back(as_real(v));
    table.unit_ids.push_back(unit);
    for (std::size_t i = 0; i < row.size(); ++i) table.columns[i].push_back(row[i]);
  }
  if (table.unit_ids.empty()) throw DataError("no units in " + c.cases.string());
  write_with(c.output_dir / kFeaturesFile, [&](std::ostream& o) { write_feature_table(o, table); });
}

CategoricalMatrix discretized(const PipelineConfig& c, const FeatureTable& table, std::ostream* log) {
  std::vector<std::string> warnings;
  auto m = discretize_table(table, discretized_columns(c), c.n_bins, &warnings);
  if (log)
    for (const auto& w : warnings) warn(*log, w);
  return m;
}

void run_associate(const PipelineConfig& c, std::ostream& log) {
  const auto table = read_feature_table(upstream(c, kFeaturesFile, Stage::Features));
  const auto cat = discretized(c, table, &log);
  write_with(c.output_dir / "categories.csv", [&](std::ostream& o) { write_categorical_matrix(o, cat); });
  write_with(c.output_dir / "bins.csv", [&](std::ostream& o) { write_bin_edges(o, cat); });

  const auto names = c.association_features.empty() ? shape_feature_names(feature_options(c)) : c.association_features;
  CategoricalMatrix sub;
  sub.unit_ids = cat.unit_ids;
  for (const auto& n : names) {
    sub.feature_names.push_back(n);
    sub.columns.push_back(cat.column(n));
    sub.edges.emplace_back();
  }
  const auto a = association_matrices(sub);
  write_with(c.output_dir / "assoc_directed.csv", [&](std::ostream& o) { write_matrix_csv(o, a.names, a.directed); });
  write_with(c.output_dir / "assoc_mutual.csv", [&](std::ostream& o) { write_matrix_csv(o, a.names, a.mutual); });
  for (double tau : c.network_thresholds) {
    const std::string t = detail::format_double(tau);
    write_file(c.output_dir / ("network_directed_" + t + ".dot"),
               to_dot(threshold_network(a, NetworkKind::Directed, tau), "directed"));
    write_file(c.output_dir / ("network_mutual_" + t + ".dot"),
               to_dot(threshold_network(a, NetworkKind::Mutual, tau), "mutual"));
  }
}

void run_fuse(const PipelineConfig& c, std::ostream& log) {
  if (c.fusions.empty()) {
    log << "fuse: no fusions configured\n";
    return;
  }
  auto table = read_feature_table(upstream(c, kFeaturesFile, Stage::Features));
  const FeatureTable source = table;
  for (const auto& spec : c.fusions) {
    KMeansOptions opts;
    opts.k = spec.k;
    opts.seed = spec.seed;
    opts.restarts = spec.restarts;
    const auto fused = kmeans_fuse(source, spec.name, spec.columns, opts);
    NumericColumn col;
    for (Category l : fused.labels) col.push_back(l == 0 ? std::nullopt : std::optional<double>(l));
    table.add_column(spec.name, std::move(col));
    write_with(c.output_dir / ("fusion_" + spec.name + "_centroids.csv"),
               [&](std::ostream& o) { write_centroids_csv(o, fused); });
  }
  write_with(c.output_dir / kFusedFile, [&](std::ostream& o) { write_feature_table(o, table); });
}

CategoricalColumn metadata_column(const std::string& field, const std::vector<std::string>& units,
                                  const MetaRegistry& meta) {
  std::vector<std::string> cities;
  for (const auto& [id, m] : meta) cities.push_back(m.city_code);
  std::sort(cities.begin(), cities.end());
  cities.erase(std::unique(cities.begin(), cities.end()), cities.end());

  CategoricalColumn col;
  for (const auto& u : units) {
    auto it = meta.find(u);
    if (it == meta.end()) throw DataError("no metadata for unit " + u);
    const UnitMeta& m = it->second;
    if (field == "region") {
      col.push_back(m.region == Region::North ? 1 : 2);
    } else if (field == "status") {
      col.push_back(m.status == Settlement::Urban ? 1 : 2);
    } else if (field == "age_group") {
      col.push_back(m.age_group.value_or(0));
    } else if (field == "city_code") {
      col.push_back(1 + static_cast<Category>(std::lower_bound(cities.begin(), cities.end(), m.city_code) -
                                              cities.begin()));
    } else {
      col.push_back(m.district_letter - 'a' + 1);
    }
  }
  return col;
}

void run_select(const PipelineConfig& c, std::ostream& log) {
  if (c.responses.empty()) {
    log << "select: no responses configured\n";
    return;
  }
  const auto table = read_feature_table(upstream(c, kFeaturesFile, Stage::Features));
  const auto cat = discretized(c, table, nullptr);

  std::map<std::string, CategoricalColumn> columns;
  for (std::size_t i = 0; i < cat.feature_names.size(); ++i) columns[cat.feature_names[i]] = cat.columns[i];
  if (!c.fusions.empty()) {
    const auto fused = read_feature_table(upstream(c, kFusedFile, Stage::Fuse));
    if (fused.unit_ids != table.unit_ids) throw DataError(std::string(kFusedFile) + " does not match " + kFeaturesFile);
    for (const auto& spec : c.fusions) {
      CategoricalColumn col;
      for (const auto& v : fused.column(spec.name)) col.push_back(v ? static_cast<Category>(std::lround(*v)) : 0);
      columns[spec.name] = std::move(col);
    }
  }
  std::optional<MetaRegistry> meta;

  for (const auto& spec : c.responses) {
    NamedColumn y{spec.response, {}};
    if (is_metadata_field(spec.response)) {
      if (!meta) meta = parse_unit_metadata(c.metadata);
      y.values = metadata_column(spec.response, table.unit_ids, *meta);
    } else {
      y.values = columns.at(spec.response);
    }
    std::vector<NamedColumn> cands;
    for (const auto& name : candidates_for(c, spec)) cands.push_back({name, columns.at(name)});
    ScanOptions opts;
    opts.replicates = spec.replicates;
    opts.seed = spec.seed;
    FactorScanner scanner(std::move(y), std::move(cands), opts);
    for (int order = 1; order <= spec.order; ++order) {
      const auto results = scanner.scan(order);
      write_with(c.output_dir / ("scan_" + spec.name + "_order" + std::to_string(order) + ".csv"),
                 [&](std::ostream& o) { write_scan_csv(o, results); });
    }
  }
}

void run_cluster(const PipelineConfig& c, std::ostream& log) {
  if (c.clusterings.empty()) {
    log << "cluster: no clusterings configured\n";
    return;
  }
  const auto table = read_feature_table(upstream(c, kFeaturesFile, Stage::Features));
  for (const auto& spec : c.clusterings) {
    const auto tree = hcluster_ward(table, spec.columns, spec.standardize);
    for (const auto& u : tree.excluded) warn(log, "clustering " + spec.name + ": unit " + u + " excluded (NA)");
    if (!tree.monotone) warn(log, "clustering " + spec.name + ": merge heights are not monotone");
    const auto codes = leaf_codes(tree);
    const auto heat = similarity_heatmap(codes, tree);
    write_with(c.output_dir / ("tree_" + spec.name + ".csv"), [&](std::ostream& o) { write_tree(o, tree); });
    write_with(c.output_dir / ("codes_" + spec.name + ".csv"), [&](std::ostream& o) { write_codes_csv(o, tree, codes); });
    write_file(c.output_dir / ("similarity_" + spec.name + ".csv"), heat.csv);
    write_file(c.output_dir / ("heatmap_" + spec.name + ".svg"), heat.svg);
  }
}

std::vector<FeatureSetResult> read_scan(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_scan_csv(in, path.filename().string());
}

void run_report(const PipelineConfig& c, std::ostream& log) {
  if (c.responses.empty()) {
    log << "report: no responses configured\n";
    return;
  }
  for (const auto& spec : c.responses) {
    const std::string order1_file = "scan_" + spec.name + "_order1.csv";
    const auto order1 = read_scan(upstream(c, order1_file.c_str(), Stage::Select));
    std::vector<FeatureSetResult> order2;
    if (spec.order >= 2) {
      const std::string order2_file = "scan_" + spec.name + "_order2.csv";
      order2 = read_scan(upstream(c, order2_file.c_str(), Stage::Select));
    }
    const std::string title = "Ranked conditional entropies of " + spec.response;
    const auto text = factor_report(order1, order2, c.top, c.bottom, ReportFormat::Text, title);
    const auto md = factor_report(order1, order2, c.top, c.bottom, ReportFormat::Markdown, title);
    for (const auto& w : text.warnings) warn(log, "report " + spec.name + ": " + w);
    write_file(c.output_dir / ("report_" + spec.name + ".txt"), text.body);
    write_file(c.output_dir / ("report_" + spec.name + ".md"), md.body);
  }
}

template <class E>
[[noreturn]] void rethrow_in_stage(Stage stage, const E& e) {
  throw E("stage " + std::string(stage_name(stage)) + ": " + e.what());
}

}  // namespace

void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log) {
  fs::create_directories(config.output_dir);
  try {
    switch (stage) {
      case Stage::Features: run_features(config, log); break;
      case Stage::Associate: run_associate(config, log); break;
      case Stage::Fuse: run_fuse(config, log); break;
      case Stage::Select: run_select(config, log); break;
      case Stage::Cluster: run_cluster(config, log); break;
      case Stage::Report: run_report(config, log); break;
    }
  } catch (const ConfigError& e) {
    rethrow_in_stage(stage, e);
  } catch (const DataError& e) {
    rethrow_in_stage(stage, e);
  } catch (const ComputationError& e) {
    rethrow_in_stage(stage, e);
  }
  write_manifest(config.output_dir);
}

fs::path run_pipeline(const PipelineConfig& config, std::ostream& log) {
  for (auto s : {Stage::Features, Stage::Associate, Stage::Fuse, Stage::Select, Stage::Cluster, Stage::Report}) {
    run_stage(s, config, log);
  }
  return config.output_dir / "manifest.txt";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw ComputationError("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

fs::path write_manifest(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = entry.path().lexically_relative(dir).generic_string();
    if (rel == "manifest.txt") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  std::ostringstream out;
  for (const auto& rel : files) {
    std::ifstream in(dir / rel, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out << sha256_hex(content) << "  " << rel << '\n';
  }
  const fs::path manifest = dir / "manifest.txt";
  write_file(manifest, out.str());
  return manifest;
}

}  // namespace epicurve
