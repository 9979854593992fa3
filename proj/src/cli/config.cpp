#include "ska/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace ska::cli {

using nlohmann::json;

ConfigError::ConfigError(std::string origin, std::string key, std::size_t line,
                         const std::string& what)
    : std::runtime_error(origin + (line ? ":" + std::to_string(line) : std::string()) +
                         (key.empty() ? std::string() : ": key '" + key + "'") + ": " + what),
      key_(std::move(key)),
      line_(line) {}

namespace {

struct Source {
  const std::string& text;
  const std::string& origin;

  std::size_t line_of_offset(std::size_t offset) const {
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset; ++i)
      if (text[i] == '\n') ++line;
    return line;
  }

  // Best-effort line of a dotted key: finds each quoted component in turn.
  std::size_t line_of_key(const std::string& path) const {
    std::size_t pos = 0;
    std::size_t found = std::string::npos;
    std::istringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
      const auto bracket = part.find('[');
      if (bracket != std::string::npos) part.resize(bracket);
      const auto at = text.find('"' + part + '"', pos);
      if (at == std::string::npos) break;
      found = at;
      pos = at + part.size() + 2;
    }
    return found == std::string::npos ? 0 : line_of_offset(found);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(origin, key, line_of_key(key), what);
  }
};

class Node {
 public:
  Node(const json& j, std::string path, const Source& src) : j_(j), path_(std::move(path)), src_(src) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& what) const { src_.fail(path_, what); }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  Node at(const std::string& key) const { return Node(j_.at(key), child_path(key), src_); }
  Node at(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]", src_); }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j_.items())
      if (!keys.count(k)) src_.fail(child_path(k), "unknown key");
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("must be finite");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }
  std::uint64_t unsigned_int() const {
    if (!j_.is_number_integer() || (j_.is_number_integer() && !j_.is_number_unsigned() && j_.get<std::int64_t>() < 0))
      fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  std::size_t count() const { return static_cast<std::size_t>(unsigned_int()); }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  Matrix matrix() const {
    const std::size_t rows = array_size();
    if (rows == 0) fail("matrix must have at least one row");
    std::size_t cols = 0;
    std::vector<double> values;
    for (std::size_t r = 0; r < rows; ++r) {
      Node row = at(r);
      const std::size_t c = row.array_size();
      if (r == 0) cols = c;
      if (c == 0 || c != cols) row.fail("matrix rows must be non-empty and equally long");
      for (std::size_t i = 0; i < c; ++i) values.push_back(row.at(i).number());
    }
    return Matrix(rows, cols, std::move(values));
  }

 private:
  const json& j_;
  std::string path_;
  const Source& src_;
};

const char* source_name(DataSource s) {
  switch (s) {
    case DataSource::synthetic: return "synthetic";
    case DataSource::mnist: return "mnist";
    case DataSource::inline_values: return "inline";
  }
  return "synthetic";
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

void parse_network(const Node& n, ExperimentConfig& cfg) {
  n.require_object({"layer_sizes", "init_std_scale", "initial_weights"});
  if (!n.has("layer_sizes")) n.fail("missing required key 'layer_sizes'");
  const Node sizes = n.at("layer_sizes");
  const std::size_t count = sizes.array_size();
  if (count < 2) sizes.fail("needs the input size and at least one layer");
  cfg.network.layer_sizes.clear();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t s = sizes.at(i).count();
    if (s == 0) sizes.at(i).fail("layer size must be positive");
    cfg.network.layer_sizes.push_back(s);
  }
  if (n.has("init_std_scale")) {
    const double v = n.at("init_std_scale").number();
    if (v < 0.0) n.at("init_std_scale").fail("must be non-negative");
    cfg.network.init_std_scale = v;
  }
  if (n.has("initial_weights")) {
    const Node w = n.at("initial_weights");
    if (w.array_size() != count - 1)
      w.fail("expected " + std::to_string(count - 1) + " weight matrices");
    for (std::size_t l = 0; l + 1 < count; ++l) {
      Matrix m = w.at(l).matrix();
      if (m.rows() != cfg.network.layer_sizes[l + 1] || m.cols() != cfg.network.layer_sizes[l])
        w.at(l).fail("expected a " + std::to_string(cfg.network.layer_sizes[l + 1]) + "x" +
                     std::to_string(cfg.network.layer_sizes[l]) + " matrix, got " +
                     to_string(m.shape()));
      cfg.initial_weights.push_back(std::move(m));
    }
  }
}

void parse_run(const Node& n, ExperimentConfig& cfg) {
  n.require_object({"dt", "steps", "total_time"});
  if (n.has("dt")) cfg.network.dt = n.at("dt").positive();
  if (n.has("steps") && n.has("total_time"))
    n.at("total_time").fail("'steps' and 'total_time' are mutually exclusive");
  if (n.has("steps")) {
    cfg.network.steps = n.at("steps").count();
    if (cfg.network.steps == 0) n.at("steps").fail("must be at least 1");
  }
  if (n.has("total_time")) {
    const double t = n.at("total_time").positive();
    const double k = std::round(t / cfg.network.dt);
    if (k < 1.0) n.at("total_time").fail("shorter than one time step");
    cfg.network.steps = static_cast<std::size_t>(k);
  }
}

void parse_data(const Node& n, ExperimentConfig& cfg) {
  n.require_object({"source", "images", "labels", "limit", "batch", "mode", "n", "d", "classes",
                    "spacing", "sigma", "background", "seed", "inputs"});
  auto& d = cfg.data;
  if (n.has("source")) {
    const std::string s = n.at("source").string();
    if (s == "synthetic") d.source = DataSource::synthetic;
    else if (s == "mnist") d.source = DataSource::mnist;
    else if (s == "inline") d.source = DataSource::inline_values;
    else n.at("source").fail("expected 'synthetic', 'mnist' or 'inline', got '" + s + "'");
  }
  if (n.has("limit")) d.limit = n.at("limit").count();
  if (n.has("batch")) d.batch = n.at("batch").count();
  if (n.has("mode")) {
    const auto mode = data::parse_batch_mode(n.at("mode").string());
    if (!mode) n.at("mode").fail("expected 'full' or 'cyclic'");
    d.mode = *mode;
  }
  if (n.has("n")) {
    d.blobs.n = n.at("n").count();
    if (d.blobs.n == 0) n.at("n").fail("must be positive");
  }
  if (n.has("classes")) {
    const std::size_t c = n.at("classes").count();
    if (c == 0 || c > 255) n.at("classes").fail("must be between 1 and 255");
    d.blobs.classes = static_cast<int>(c);
  }
  if (n.has("spacing")) d.blobs.spacing = n.at("spacing").positive();
  if (n.has("sigma")) {
    d.blobs.sigma = n.at("sigma").number();
    if (d.blobs.sigma < 0.0) n.at("sigma").fail("must be non-negative");
  }
  if (n.has("background")) {
    d.blobs.background = n.at("background").number();
    if (d.blobs.background < 0.0 || d.blobs.background > 1.0) n.at("background").fail("must lie in [0, 1]");
  }
  if (n.has("seed")) d.blobs.seed = n.at("seed").unsigned_int();
  const std::size_t input_dim = cfg.network.layer_sizes.front();
  d.blobs.d = input_dim;
  if (n.has("d") && n.at("d").count() != input_dim)
    n.at("d").fail("must equal network.layer_sizes[0] = " + std::to_string(input_dim));
  if (static_cast<std::size_t>(d.blobs.classes) > input_dim && d.source == DataSource::synthetic)
    n.fail("more classes than input features");
  if (n.has("inputs")) d.inputs = n.at("inputs").matrix();
}

void finish_data(const Node& root, const Source& src, ExperimentConfig& cfg,
                 const std::filesystem::path& base) {
  auto& d = cfg.data;
  const std::size_t input_dim = cfg.network.layer_sizes.front();
  switch (d.source) {
    case DataSource::mnist:
      if (!root.has("data") || !root.at("data").has("images"))
        src.fail("data.images", "required when data.source is 'mnist'");
      d.images = resolve(base, root.at("data").at("images").string());
      if (root.at("data").has("labels")) d.labels = resolve(base, root.at("data").at("labels").string());
      if (input_dim != 784) src.fail("network.layer_sizes", "MNIST input needs layer_sizes[0] = 784");
      break;
    case DataSource::inline_values:
      if (!d.inputs) src.fail("data.inputs", "required when data.source is 'inline'");
      if (d.inputs->cols() != input_dim)
        src.fail("data.inputs", "rows must have " + std::to_string(input_dim) + " values");
      for (double v : d.inputs->flat())
        if (v < 0.0 || v > 1.0) src.fail("data.inputs", "values must lie in [0, 1]");
      break;
    case DataSource::synthetic:
      break;
  }
}

void parse_invariance(const Node& n, ExperimentConfig& cfg) {
  n.require_object({"eta_list", "total_time", "tolerance", "coarse_tolerance", "seeds", "metrics",
                    "normalize", "pairwise"});
  auto& inv = cfg.invariance;
  if (n.has("eta_list")) {
    const Node e = n.at("eta_list");
    inv.eta_list.clear();
    for (std::size_t i = 0; i < e.array_size(); ++i) inv.eta_list.push_back(e.at(i).positive());
    if (inv.eta_list.empty()) e.fail("must not be empty");
  }
  if (n.has("total_time")) inv.total_time = n.at("total_time").positive();
  if (n.has("tolerance")) inv.tolerance = n.at("tolerance").positive();
  if (n.has("coarse_tolerance")) inv.coarse_tolerance = n.at("coarse_tolerance").positive();
  if (n.has("seeds")) {
    const Node s = n.at("seeds");
    inv.seeds.clear();
    for (std::size_t i = 0; i < s.array_size(); ++i) inv.seeds.push_back(s.at(i).unsigned_int());
    if (inv.seeds.size() != inv.eta_list.size())
      s.fail("needs one seed per eta_list entry (" + std::to_string(inv.eta_list.size()) + ")");
  }
  if (n.has("metrics")) {
    const Node m = n.at("metrics");
    inv.metrics.clear();
    for (std::size_t i = 0; i < m.array_size(); ++i) {
      const auto metric = invariance::parse_metric(m.at(i).string());
      if (!metric)
        m.at(i).fail("expected one of entropy_step_normalized, entropy_step, cosine, z_norm, net_cum");
      inv.metrics.push_back(*metric);
    }
    if (inv.metrics.empty()) m.fail("must not be empty");
  }
  if (n.has("normalize")) inv.normalize = n.at("normalize").boolean();
  if (n.has("pairwise")) inv.pairwise = n.at("pairwise").boolean();
  for (double eta : inv.eta_list)
    if (std::round(inv.total_time / eta) < 2.0)
      n.fail("eta " + std::to_string(eta) + " gives fewer than 2 steps over total_time " +
             std::to_string(inv.total_time));
}

void parse_variational(const Node& n, ExperimentConfig& cfg) {
  n.require_object({"selections", "dt_halving"});
  auto& v = cfg.variational;
  if (n.has("selections")) {
    const Node s = n.at("selections");
    v.selections.clear();
    for (std::size_t i = 0; i < s.array_size(); ++i) {
      const Node item = s.at(i);
      UnitSelection sel;
      if (item.raw().is_array()) {
        if (item.array_size() != 3) item.fail("expected [layer, unit, sample]");
        sel = {item.at(std::size_t{0}).count(), item.at(1).count(), item.at(2).count()};
      } else {
        item.require_object({"layer", "unit", "sample"});
        if (!item.has("layer") || !item.has("unit") || !item.has("sample"))
          item.fail("expected keys layer, unit and sample");
        sel = {item.at("layer").count(), item.at("unit").count(), item.at("sample").count()};
      }
      if (sel.layer + 1 >= cfg.network.layer_sizes.size())
        item.fail("layer " + std::to_string(sel.layer) + " does not exist");
      if (sel.unit >= cfg.network.layer_sizes[sel.layer + 1])
        item.fail("unit " + std::to_string(sel.unit) + " does not exist in layer " +
                  std::to_string(sel.layer));
      v.selections.push_back(sel);
    }
    if (v.selections.empty()) s.fail("must not be empty");
  }
  if (n.has("dt_halving")) v.dt_halving = n.at("dt_halving").boolean();
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::filesystem::path& base_dir) {
  const Source src{text, origin};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin, "", src.line_of_offset(e.byte == 0 ? 0 : e.byte - 1),
                      "invalid JSON: " + std::string(e.what()));
  }
  const Node root(j, "", src);
  if (!j.is_object()) throw ConfigError(origin, "", 1, "config must be a JSON object");
  root.require_object({"seed", "network", "run", "data", "invariance", "variational"});

  ExperimentConfig cfg;
  if (!root.has("network")) throw ConfigError(origin, "network", 0, "missing required section");
  if (root.has("seed")) {
    cfg.network.seed = root.at("seed").unsigned_int();
    cfg.data.blobs.seed = cfg.network.seed;
  }
  parse_network(root.at("network"), cfg);
  if (root.has("run")) parse_run(root.at("run"), cfg);
  if (root.has("data")) parse_data(root.at("data"), cfg);
  else cfg.data.blobs.d = cfg.network.layer_sizes.front();
  finish_data(root, src, cfg, base_dir);
  if (root.has("invariance")) parse_invariance(root.at("invariance"), cfg);
  if (root.has("variational")) parse_variational(root.at("variational"), cfg);
  cfg.invariance.base = cfg.network;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "", 0, "cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto base = path.parent_path();
  // A manifest carries the resolved config under "config".
  try {
    const json j = json::parse(text);
    if (j.is_object() && j.contains("config") && j.contains("artifacts"))
      return parse_config(j.at("config").dump(2), path.string() + " (config block)", base);
  } catch (const json::parse_error&) {
  }
  return parse_config(text, path.string(), base);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.network.seed;
  j["network"]["layer_sizes"] = cfg.network.layer_sizes;
  j["network"]["init_std_scale"] = cfg.network.init_std_scale;
  if (!cfg.initial_weights.empty()) {
    json w = json::array();
    for (const auto& m : cfg.initial_weights) w.push_back(matrix_json(m));
    j["network"]["initial_weights"] = std::move(w);
  }
  j["run"]["dt"] = cfg.network.dt;
  j["run"]["steps"] = cfg.network.steps;

  const auto& d = cfg.data;
  json& dj = j["data"];
  dj["source"] = source_name(d.source);
  dj["batch"] = d.batch;
  dj["mode"] = data::to_string(d.mode);
  switch (d.source) {
    case DataSource::synthetic:
      dj["n"] = d.blobs.n;
      dj["d"] = d.blobs.d;
      dj["classes"] = d.blobs.classes;
      dj["spacing"] = d.blobs.spacing;
      dj["sigma"] = d.blobs.sigma;
      dj["background"] = d.blobs.background;
      dj["seed"] = d.blobs.seed;
      break;
    case DataSource::mnist:
      dj["images"] = std::filesystem::absolute(d.images).lexically_normal().string();
      if (!d.labels.empty()) dj["labels"] = std::filesystem::absolute(d.labels).lexically_normal().string();
      dj["limit"] = d.limit;
      break;
    case DataSource::inline_values:
      dj["inputs"] = matrix_json(*d.inputs);
      break;
  }

  const auto& inv = cfg.invariance;
  json& ij = j["invariance"];
  ij["eta_list"] = inv.eta_list;
  ij["total_time"] = inv.total_time;
  ij["tolerance"] = inv.tolerance;
  ij["coarse_tolerance"] = inv.coarse_tolerance;
  if (!inv.seeds.empty()) ij["seeds"] = inv.seeds;
  json metrics = json::array();
  for (auto m : inv.metrics) metrics.push_back(invariance::metric_name(m, false));
  ij["metrics"] = std::move(metrics);
  ij["normalize"] = inv.normalize;
  ij["pairwise"] = inv.pairwise;

  json sels = json::array();
  for (const auto& s : cfg.variational.selections) sels.push_back({s.layer, s.unit, s.sample});
  j["variational"]["selections"] = std::move(sels);
  j["variational"]["dt_halving"] = cfg.variational.dt_halving;
  return j;
}

data::Dataset build_dataset(const DataConfig& cfg) {
  switch (cfg.source) {
    case DataSource::synthetic:
      return data::synthetic_blobs(cfg.blobs);
    case DataSource::mnist:
      return data::load_mnist(cfg.images,
                              cfg.labels.empty() ? std::nullopt
                                                 : std::optional<std::filesystem::path>(cfg.labels),
                              cfg.limit);
    case DataSource::inline_values: {
      data::Dataset ds{*cfg.inputs, std::nullopt, 0, data::Source::inline_values};
      data::validate(ds);
      return ds;
    }
  }
  throw std::logic_error("unknown data source");
}

}  // namespace ska::cli
