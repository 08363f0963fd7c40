#include "rmtlab/harness.hpp"

#include "rmtlab/errors.hpp"
#include "rmtlab/experiments.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace rmtlab {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::string_view kExperimentNames[] = {
    "identities", "density", "spectra", "girko", "scaling", "bound_probe", "functional", "compare", "half_gain",
};

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string_view::npos ? -1 : line_of_offset(text, pos);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ConfigError(field, what, line_of_key(text_, field));
  }

  void only(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) const {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) fail(key, "unknown key");
  }

  template <class T>
  T get(const json& v, const std::string& field) const {
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(field, e.what());
    }
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  std::size_t count(const json& v, const std::string& field) const {
    if (!v.is_number_unsigned()) fail(field, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::complex<double> complex(const json& v, const std::string& field) const {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    fail(field, "expected a number or [re, im]");
  }

  std::vector<std::complex<double>> complex_list(const json& v, const std::string& field) const {
    if (!v.is_array()) fail(field, "expected a list");
    std::vector<std::complex<double>> out;
    for (const auto& e : v) out.push_back(complex(e, field));
    return out;
  }

 private:
  std::string_view text_;
};

ojson complex_json(std::complex<double> c) { return ojson::array({c.real(), c.imag()}); }

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string run_id_line(const std::string& id) { return "# run-id: " + id + "\n"; }

}  // namespace

std::string_view to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment experiment_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kExperimentNames); ++i)
    if (kExperimentNames[i] == name) return static_cast<Experiment>(i);
  throw ConfigError("experiment", "unknown experiment '" + std::string(name) + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (std::size_t i = 0; i < std::size(kExperimentNames); ++i) v.push_back(static_cast<Experiment>(i));
    return v;
  }();
  return all;
}

EnsembleSpec ExperimentConfig::ensemble(std::size_t n) const {
  EnsembleSpec spec;
  spec.dimension = n;
  spec.law = law;
  spec.third_moment = third_moment;
  spec.field = field;
  spec.validate();
  return spec;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what(), line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  const Reader r(text);
  r.only(doc, "", {"experiment", "ensemble", "parameters", "output_dir", "threads"});
  ExperimentConfig c;
  if (!doc.contains("experiment")) r.fail("experiment", "missing");
  if (!doc["experiment"].is_string()) r.fail("experiment", "expected a string");
  try {
    c.experiment = experiment_from_string(doc["experiment"].get<std::string>());
  } catch (const ConfigError&) {
    r.fail("experiment", "unknown experiment '" + doc["experiment"].get<std::string>() + "'");
  }

  if (doc.contains("ensemble")) {
    const json& e = doc["ensemble"];
    r.only(e, "ensemble", {"entry_law", "third_moment_mode", "scalar_field"});
    if (e.contains("entry_law")) {
      try {
        c.law = entry_law_from_string(r.get<std::string>(e["entry_law"], "entry_law"));
      } catch (const InvalidArgument& ex) {
        r.fail("entry_law", ex.what());
      }
    }
    if (e.contains("third_moment_mode")) {
      const auto m = r.get<std::string>(e["third_moment_mode"], "third_moment_mode");
      if (m == "generic") c.third_moment = ThirdMomentMode::generic;
      else if (m == "vanishing") c.third_moment = ThirdMomentMode::vanishing;
      else r.fail("third_moment_mode", "expected generic or vanishing");
    }
    if (e.contains("scalar_field")) {
      const auto f = r.get<std::string>(e["scalar_field"], "scalar_field");
      if (f == "real") c.field = ScalarField::real;
      else if (f == "complex") c.field = ScalarField::complex;
      else r.fail("scalar_field", "expected real or complex");
    }
  }

  if (doc.contains("parameters")) {
    const json& p = doc["parameters"];
    r.only(p, "parameters",
           {"N", "s", "z0", "epsilon", "w", "z", "x_min", "x_max", "points", "eta", "trials", "seed", "a", "b",
            "k", "v", "grid_nodes", "level", "bootstrap", "law_prime"});
    auto& q = c.params;
    if (p.contains("N")) {
      const json& n = p["N"];
      q.sizes.clear();
      if (n.is_array()) {
        for (const auto& e : n) q.sizes.push_back(r.count(e, "N"));
      } else {
        q.sizes.push_back(r.count(n, "N"));
      }
      if (q.sizes.empty()) r.fail("N", "empty list");
      for (auto n_value : q.sizes)
        if (n_value == 0) r.fail("N", "dimension must be positive");
    }
    if (p.contains("s")) q.s = r.number(p["s"], "s");
    if (p.contains("z0")) q.z0 = r.complex(p["z0"], "z0");
    if (p.contains("epsilon")) q.epsilon = r.number(p["epsilon"], "epsilon");
    if (p.contains("w")) q.w = r.complex_list(p["w"], "w");
    if (p.contains("z")) q.z = r.complex_list(p["z"], "z");
    if (p.contains("x_min")) q.x_min = r.number(p["x_min"], "x_min");
    if (p.contains("x_max")) q.x_max = r.number(p["x_max"], "x_max");
    if (p.contains("points")) q.points = static_cast<int>(r.count(p["points"], "points"));
    if (p.contains("eta")) q.eta = r.number(p["eta"], "eta");
    if (p.contains("trials")) q.trials = r.count(p["trials"], "trials");
    if (p.contains("seed")) q.seed = r.count(p["seed"], "seed");
    if (p.contains("a")) q.a = r.count(p["a"], "a");
    if (p.contains("b")) q.b = r.count(p["b"], "b");
    if (p.contains("k")) q.k = r.count(p["k"], "k");
    if (p.contains("v")) {
      if (!p["v"].is_array()) r.fail("v", "expected a list");
      q.v.clear();
      for (const auto& e : p["v"]) q.v.push_back(r.number(e, "v"));
    }
    if (p.contains("grid_nodes")) q.grid_nodes = static_cast<int>(r.count(p["grid_nodes"], "grid_nodes"));
    if (p.contains("level")) q.level = r.number(p["level"], "level");
    if (p.contains("bootstrap")) q.bootstrap = r.count(p["bootstrap"], "bootstrap");
    if (p.contains("law_prime")) {
      try {
        q.law_prime = entry_law_from_string(r.get<std::string>(p["law_prime"], "law_prime"));
      } catch (const InvalidArgument& ex) {
        r.fail("law_prime", ex.what());
      }
    }
    if (!(q.eta > 0.0)) r.fail("eta", "must be positive");
    if (!(q.level > 0.0 && q.level < 1.0)) r.fail("level", "must lie in (0, 1)");
    if (!(q.x_max > q.x_min)) r.fail("x_max", "must exceed x_min");
    if (!(q.epsilon > 0.0)) r.fail("epsilon", "must be positive");
  }
  if (doc.contains("output_dir")) c.output_dir = r.get<std::string>(doc["output_dir"], "output_dir");
  if (doc.contains("threads")) {
    c.threads = static_cast<unsigned>(r.count(doc["threads"], "threads"));
    if (c.threads == 0) r.fail("threads", "must be at least 1");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string to_text(const ExperimentConfig& c) {
  const auto& q = c.params;
  ojson doc;
  doc["experiment"] = std::string(to_string(c.experiment));
  doc["ensemble"] = {{"entry_law", std::string(to_string(c.law))},
                     {"third_moment_mode", c.third_moment == ThirdMomentMode::vanishing ? "vanishing" : "generic"},
                     {"scalar_field", c.field == ScalarField::complex ? "complex" : "real"}};
  ojson p;
  p["N"] = q.sizes;
  p["s"] = q.s;
  p["z0"] = complex_json(q.z0);
  p["epsilon"] = q.epsilon;
  p["w"] = ojson::array();
  for (auto v : q.w) p["w"].push_back(complex_json(v));
  p["z"] = ojson::array();
  for (auto v : q.z) p["z"].push_back(complex_json(v));
  p["x_min"] = q.x_min;
  p["x_max"] = q.x_max;
  p["points"] = q.points;
  p["eta"] = q.eta;
  p["trials"] = q.trials;
  p["seed"] = q.seed;
  p["a"] = q.a;
  p["b"] = q.b;
  p["k"] = q.k;
  p["v"] = q.v;
  p["grid_nodes"] = q.grid_nodes;
  p["level"] = q.level;
  p["bootstrap"] = q.bootstrap;
  p["law_prime"] = std::string(to_string(q.law_prime));
  doc["parameters"] = p;
  doc["output_dir"] = c.output_dir;
  doc["threads"] = c.threads;
  return doc.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(to_text(config));
  return out.str();
}

const Table* ResultStore::find(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

fs::path output_root() {
  if (const char* env = std::getenv("RMTLAB_OUTPUT_ROOT"); env && *env) return env;
  return "rmtlab-runs";
}

ResultStore run(const ExperimentConfig& config) {
  const fs::path root = config.output_dir.empty() ? output_root() : fs::path(config.output_dir);
  ExperimentOutput out = run_experiment(config);

  ResultStore store;
  const std::string base = timestamp() + "-" + config_hash(config);
  store.run_id = base;
  for (int suffix = 2; fs::exists(root / store.run_id); ++suffix)
    store.run_id = base + "-" + std::to_string(suffix);
  store.directory = root / store.run_id;
  fs::create_directories(store.directory);

  store.tables = std::move(out.tables);
  store.failures = std::move(out.failures);
  store.deterministic_ok = store.failures.empty();
  ojson summary = ojson::parse(out.summary);
  ojson full;
  full["run_id"] = store.run_id;
  full["experiment"] = std::string(to_string(config.experiment));
  full["deterministic_ok"] = store.deterministic_ok;
  full["failures"] = store.failures;
  for (auto& [k, v] : summary.items()) full[k] = v;
  store.summary = full.dump(2) + "\n";

  write_file(store.directory / "config.json", to_text(config));
  for (const auto& t : store.tables) write_file(store.directory / (t.name + ".csv"), run_id_line(store.run_id) + t.csv);
  write_file(store.directory / "summary.json", store.summary);
  return store;
}

ResultStore load_store(const std::string& run_id, const fs::path& root) {
  ResultStore store;
  store.run_id = run_id;
  store.directory = root / run_id;
  if (!fs::is_directory(store.directory)) throw Error("no run '" + run_id + "' under " + root.string());
  store.summary = read_file(store.directory / "summary.json");
  const json s = json::parse(store.summary);
  store.deterministic_ok = s.value("deterministic_ok", true);
  store.failures = s.value("failures", std::vector<std::string>{});
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(store.directory)) {
    const auto& p = entry.path();
    if (p.extension() == ".csv" && p.stem().string().rfind("plot_", 0) != 0) files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::string content = read_file(p);
    if (content.rfind("# run-id", 0) == 0) content.erase(0, content.find('\n') + 1);
    store.tables.push_back({p.stem().string(), std::move(content)});
  }
  return store;
}

std::vector<std::string> list_runs(const fs::path& root) {
  std::vector<std::string> ids;
  if (!fs::is_directory(root)) return ids;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "summary.json")) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

fs::path emit_plotdata(const ResultStore& store, std::string_view which) {
  const Table* t = store.find(which);
  if (!t) throw Error("run " + store.run_id + " has no table '" + std::string(which) + "'");
  const fs::path path = store.directory / ("plot_" + std::string(which) + ".csv");
  write_file(path, run_id_line(store.run_id) + t->csv);
  return path;
}

}  // namespace rmtlab
