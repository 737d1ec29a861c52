// Copyright 2026 The tcgp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tcgp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "tcgp/benchfns.hpp"
#include "tcgp/error.hpp"

namespace tcgp {

using nlohmann::json;

namespace {

constexpr std::uint64_t kMetricStream = 0x9E3779B97F4A7C15ULL;

const std::set<std::string> kMethodKeys = {
    "label",          "method",       "rule",          "criterion",          "ucb_eps",
    "budget",         "initial",      "delta",         "p_min",              "particles",
    "box",            "regularity",   "candidates",    "refine_evaluations", "refine_tolerance",
    "include_gaussian", "grid_points", "smc_rounds",   "smc_halve_every",    "smc_initial_scale",
    "smc_polish",     "mle_restarts", "w_max",         "record_timings"};

const std::set<std::string> kCampaignKeys = {"name",    "functions", "methods", "defaults", "replicates",
                                             "base_seed", "metrics", "targets"};

const std::set<std::string> kMetricKeys = {"p_mn",      "twcrps",     "r_t",        "tks_pit",
                                           "start",     "every",      "probes",     "tks_points",
                                           "particles", "crps_draws", "mh_sweeps",  "stage_cap"};

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InputError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

BoConfig parse_bo_config(const json& j) {
  BoConfig c;
  c.method = method_from_string(get_or<std::string>(j, "method", "tcgp"));
  if (j.contains("rule") && !j.at("rule").is_null()) c.rule = selection_rule_from_string(j.at("rule").get<std::string>());
  const std::string criterion = get_or<std::string>(j, "criterion", "ei");
  if (criterion == "ei") {
    c.criterion = Criterion::ei();
  } else if (criterion == "ucb") {
    c.criterion = Criterion::ucb(get_or<double>(j, "ucb_eps", 0.1));
  } else {
    throw InputError("unknown criterion '" + criterion + "'");
  }
  if (c.criterion.kind == Criterion::Kind::Ei) c.criterion.eps = get_or<double>(j, "ucb_eps", 0.1);
  c.budget = get_or<int>(j, "budget", 0);
  c.initial = get_or<int>(j, "initial", 0);
  c.delta = get_or<double>(j, "delta", c.delta);
  c.p_min = get_or<double>(j, "p_min", c.p_min);
  c.particles = get_or<int>(j, "particles", c.particles);
  if (j.contains("box")) {
    const json& b = j.at("box");
    reject_unknown(b, {"beta_lo", "beta_hi", "lambda_lo", "lambda_hi"}, "box");
    c.box.beta_lo = get_or<double>(b, "beta_lo", c.box.beta_lo);
    c.box.beta_hi = get_or<double>(b, "beta_hi", c.box.beta_hi);
    c.box.lambda_lo = get_or<double>(b, "lambda_lo", c.box.lambda_lo);
    c.box.lambda_hi = get_or<double>(b, "lambda_hi", c.box.lambda_hi);
  }
  c.regularity = get_or<int>(j, "regularity", c.regularity);
  c.select.candidates = get_or<int>(j, "candidates", c.select.candidates);
  c.select.refine_evaluations = get_or<int>(j, "refine_evaluations", c.select.refine_evaluations);
  c.select.refine_tolerance = get_or<double>(j, "refine_tolerance", c.select.refine_tolerance);
  c.select.include_gaussian = get_or<bool>(j, "include_gaussian", c.select.include_gaussian);
  c.grid_points = get_or<std::size_t>(j, "grid_points", c.grid_points);
  c.smc.rounds = get_or<int>(j, "smc_rounds", c.smc.rounds);
  c.smc.halve_every = get_or<int>(j, "smc_halve_every", c.smc.halve_every);
  c.smc.initial_scale = get_or<double>(j, "smc_initial_scale", c.smc.initial_scale);
  c.smc.polish = get_or<bool>(j, "smc_polish", c.smc.polish);
  c.mle_restarts = get_or<int>(j, "mle_restarts", c.mle_restarts);
  if (j.contains("w_max") && !j.at("w_max").is_null()) c.w_max = get_or<double>(j, "w_max", 0.0);
  c.record_timings = get_or<bool>(j, "record_timings", c.record_timings);
  return c;
}

json schedule_to_json(const MetricSchedule& s) {
  return json{{"p_mn", s.p_mn},           {"twcrps", s.twcrps},
              {"r_t", s.r_t},             {"tks_pit", s.tks_pit},
              {"start", s.start},         {"every", s.every},
              {"probes", s.probes},       {"tks_points", s.tks_points},
              {"particles", s.particles}, {"crps_draws", s.crps_draws},
              {"mh_sweeps", s.subset.mh_sweeps}, {"stage_cap", s.subset.stage_cap}};
}

MetricSchedule parse_schedule(const json& j) {
  reject_unknown(j, kMetricKeys, "metrics");
  MetricSchedule s;
  s.p_mn = get_or<bool>(j, "p_mn", s.p_mn);
  s.twcrps = get_or<bool>(j, "twcrps", s.twcrps);
  s.r_t = get_or<bool>(j, "r_t", s.r_t);
  s.tks_pit = get_or<bool>(j, "tks_pit", s.tks_pit);
  s.start = get_or<int>(j, "start", s.start);
  s.every = get_or<int>(j, "every", s.every);
  s.probes = get_or<int>(j, "probes", s.probes);
  s.tks_points = get_or<int>(j, "tks_points", s.tks_points);
  s.particles = get_or<int>(j, "particles", s.particles);
  s.crps_draws = get_or<int>(j, "crps_draws", s.crps_draws);
  s.subset.mh_sweeps = get_or<int>(j, "mh_sweeps", s.subset.mh_sweeps);
  s.subset.stage_cap = get_or<int>(j, "stage_cap", s.subset.stage_cap);
  return s;
}

json point_json(const Point& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_label(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(",\"\n\r/\\") != std::string::npos) {
    throw InputError(std::string(what) + " label '" + s + "' is empty or contains a reserved character");
  }
}

// Diagnostics attached to one cell: probe set, warm particle cloud, and the
// metric stream.
class CellMetrics {
 public:
  CellMetrics(const MetricSchedule& s, const TestFunction& f, std::uint64_t seed)
      : s_(s), f_(f), rng_(seed + kMetricStream) {
    if (s_.any_calibration()) {
      probes_.resize(s_.probes, static_cast<Eigen::Index>(f_.dim));
      responses_.resize(s_.probes);
      for (Eigen::Index i = 0; i < probes_.rows(); ++i) {
        const Point x = f_.bounds.sample(rng_);
        probes_.row(i) = x.transpose();
        responses_[i] = f_(x);
      }
    }
  }

  void add_excursion(json& row, double m) {
    if (!s_.p_mn) return;
    try {
      descend(m);
      row["p_mn"] = cloud_->p_estimate();
    } catch (const std::exception& e) {
      row["p_mn"] = nullptr;
      row["metric_errors"].push_back(std::string("p_mn: ") + e.what());
    }
  }

  void add_calibration(json& row, const StepContext& ctx) {
    const double m = ctx.incumbent;
    if (s_.r_t) {
      guarded(row, "r_t", [&] { return testset_occurrence(ctx.model, ctx.residual, m, probes_, responses_); });
    }
    if (s_.twcrps) {
      guarded(row, "twcrps",
              [&] { return testset_twcrps(ctx.model, ctx.residual, m, probes_, responses_, s_.crps_draws, rng_); });
    }
    if (s_.tks_pit) {
      guarded(row, "tks_pit", [&] {
        descend(m);
        return testset_tkspit(ctx.model, ctx.residual, m, *cloud_, static_cast<std::size_t>(s_.tks_points));
      });
    }
  }

 private:
  void descend(double m) {
    if (!cloud_ || m < cloud_->level) {
      cloud_ = subset_simulate(f_.eval, f_.bounds, m, s_.particles, rng_, cloud_, s_.subset);
    }
  }

  template <typename F>
  void guarded(json& row, const char* key, F&& compute) {
    try {
      row[key] = compute();
    } catch (const std::exception& e) {
      row[key] = nullptr;
      row["metric_errors"].push_back(std::string(key) + ": " + e.what());
    }
  }

  const MetricSchedule& s_;
  const TestFunction& f_;
  Rng rng_;
  Eigen::MatrixXd probes_;
  Eigen::VectorXd responses_;
  std::optional<ParticleCloud> cloud_;
};

}  // namespace

std::string FunctionSpec::label() const { return name + "_d" + std::to_string(dim); }

void Campaign::validate() const {
  if (replicates < 1) throw InputError("campaign: replicates must be >= 1");
  if (functions.empty()) throw InputError("campaign: no functions");
  if (methods.empty()) throw InputError("campaign: no methods");
  if (metrics.every < 1 || metrics.start < 0) throw InputError("campaign: metric schedule needs every >= 1, start >= 0");
  if (metrics.probes < 1 || metrics.tks_points < 1 || metrics.crps_draws < 2 || metrics.particles < 2) {
    throw InputError("campaign: metric sizes out of range");
  }
  std::set<std::string> labels;
  for (const auto& m : methods) {
    check_label(m.label, "method");
    if (!labels.insert(m.label).second) throw InputError("campaign: duplicate method label '" + m.label + "'");
  }
  for (const auto& f : functions) {
    check_label(f.name, "function");
    const TestFunction tf = make_test_function(f.name, f.dim);
    for (const auto& m : methods) m.config.validate(tf.dim);
  }
}

Campaign parse_campaign(const json& j) {
  reject_unknown(j, kCampaignKeys, "campaign");
  Campaign c;
  c.name = get_or<std::string>(j, "name", c.name);
  c.replicates = get_or<int>(j, "replicates", c.replicates);
  c.base_seed = get_or<std::uint64_t>(j, "base_seed", c.base_seed);
  c.targets = get_or<std::vector<double>>(j, "targets", {});
  if (j.contains("metrics")) c.metrics = parse_schedule(j.at("metrics"));
  if (!j.contains("functions") || !j.at("functions").is_array()) throw InputError("campaign: 'functions' array required");
  for (const json& f : j.at("functions")) {
    reject_unknown(f, {"name", "dim"}, "function entry");
    c.functions.push_back({get_or<std::string>(f, "name", ""), get_or<std::size_t>(f, "dim", 0)});
  }
  json defaults = j.contains("defaults") ? j.at("defaults") : json::object();
  reject_unknown(defaults, kMethodKeys, "defaults");
  if (!j.contains("methods") || !j.at("methods").is_array()) throw InputError("campaign: 'methods' array required");
  for (const json& m : j.at("methods")) {
    reject_unknown(m, kMethodKeys, "method entry");
    json merged = defaults;
    merged.update(m);
    const BoConfig cfg = parse_bo_config(merged);
    const std::string label = get_or<std::string>(merged, "label", to_string(cfg.method));
    c.methods.push_back({label, cfg});
  }
  c.validate();
  return c;
}

Campaign load_campaign(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("campaign file " + path.string() + ": " + e.what());
  }
  return parse_campaign(j);
}

json to_json(const BoConfig& c) {
  json j{{"method", to_string(c.method)},
         {"rule", to_string(c.selection_rule())},
         {"criterion", c.criterion.kind == Criterion::Kind::Ei ? "ei" : "ucb"},
         {"ucb_eps", c.criterion.eps},
         {"budget", c.budget},
         {"initial", c.initial},
         {"delta", c.delta},
         {"p_min", c.p_min},
         {"particles", c.particles},
         {"box",
          {{"beta_lo", c.box.beta_lo},
           {"beta_hi", c.box.beta_hi},
           {"lambda_lo", c.box.lambda_lo},
           {"lambda_hi", c.box.lambda_hi}}},
         {"regularity", c.regularity},
         {"candidates", c.select.candidates},
         {"refine_evaluations", c.select.refine_evaluations},
         {"refine_tolerance", c.select.refine_tolerance},
         {"include_gaussian", c.select.include_gaussian},
         {"grid_points", c.grid_points},
         {"smc_rounds", c.smc.rounds},
         {"smc_halve_every", c.smc.halve_every},
         {"smc_initial_scale", c.smc.initial_scale},
         {"smc_polish", c.smc.polish},
         {"mle_restarts", c.mle_restarts},
         {"w_max", c.w_max ? json(*c.w_max) : json(nullptr)},
         {"record_timings", c.record_timings}};
  if (c.fixed_model) {
    j["fixed_model"] = {{"mean", c.fixed_model->mean},
                        {"variance", c.fixed_model->kernel.variance},
                        {"lengthscales", point_json(c.fixed_model->kernel.lengthscales)},
                        {"regularity", c.fixed_model->kernel.regularity}};
  }
  return j;
}

json to_json(const Campaign& c) {
  json functions = json::array();
  for (const auto& f : c.functions) functions.push_back({{"name", f.name}, {"dim", f.dim}});
  json methods = json::array();
  for (const auto& m : c.methods) {
    json e = to_json(m.config);
    e["label"] = m.label;
    methods.push_back(std::move(e));
  }
  return json{{"name", c.name},         {"functions", functions},      {"methods", methods},
              {"replicates", c.replicates}, {"base_seed", c.base_seed}, {"metrics", schedule_to_json(c.metrics)},
              {"targets", c.targets}};
}

std::string cell_file_name(const FunctionSpec& f, const std::string& method, int replicate) {
  return f.label() + "__" + method + "__r" + std::to_string(replicate) + ".ndjson";
}

std::vector<json> run_cell(const Campaign& c, const FunctionSpec& fs, const MethodSpec& ms, int replicate,
                           CellOutcome& outcome) {
  const TestFunction f = make_test_function(fs.name, fs.dim);
  BoConfig cfg = ms.config;
  cfg.seed = c.base_seed + static_cast<std::uint64_t>(replicate);

  outcome.file = cell_file_name(fs, ms.label, replicate);
  outcome.function = fs.label();
  outcome.method = ms.label;
  outcome.replicate = replicate;
  outcome.seed = cfg.seed;

  const json config_echo{{"campaign", c.name},   {"function", fs.name},  {"dim", fs.dim},
                         {"method", ms.label},   {"replicate", replicate}, {"seed", cfg.seed},
                         {"bo", to_json(cfg)},   {"metrics", schedule_to_json(c.metrics)}};
  auto base_row = [&](const char* type, int n) {
    return json{{"type", type},    {"function", fs.label()}, {"method", ms.label},
                {"replicate", replicate}, {"n", n}};
  };

  CellMetrics metrics(c.metrics, f, cfg.seed);
  std::vector<json> rows;
  std::vector<RunRecord> initial;
  std::string diagnostic;
  std::optional<BoState> state;
  try {
    state.emplace(initial_state(f.eval, f.bounds, cfg, &initial));
    for (const RunRecord& r : initial) {
      json row = base_row("init", r.n);
      row["x"] = point_json(r.x);
      row["z"] = r.z;
      row["m_n"] = r.incumbent;
      if (c.metrics.scheduled(r.n)) metrics.add_excursion(row, r.incumbent);
      row["config"] = config_echo;
      rows.push_back(std::move(row));
    }
    while (static_cast<int>(state->data.size()) < cfg.budget) {
      json row;
      auto observer = [&](const StepContext& ctx, const RunRecord& r) {
        row = base_row("iteration", r.n);
        if (c.metrics.scheduled(r.n) && c.metrics.any_calibration()) metrics.add_calibration(row, ctx);
      };
      const RunRecord r = bo_step(*state, cfg, f.eval, observer);
      row["x"] = point_json(r.x);
      row["z"] = r.z;
      row["m_n"] = r.incumbent;
      row["t_n"] = r.threshold;
      row["frozen"] = r.threshold_frozen;
      row["beta"] = r.beta;
      row["lambda"] = r.lambda;
      row["objective"] = r.objective_value;
      row["acquisition"] = r.acquisition_value;
      row["degenerate"] = r.acquisition_degenerate;
      if (r.timings) {
        row["timings"] = {{"fit", r.timings->fit},
                          {"calibrate", r.timings->calibrate},
                          {"acquire", r.timings->acquire},
                          {"evaluate", r.timings->evaluate}};
      }
      if (c.metrics.scheduled(r.n)) metrics.add_excursion(row, r.incumbent);
      row["config"] = config_echo;
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    diagnostic = e.what();
  }

  outcome.ok = diagnostic.empty();
  outcome.error = diagnostic;
  json final_row = base_row("final", state ? static_cast<int>(state->data.size()) : 0);
  final_row["status"] = outcome.ok ? "ok" : "aborted";
  if (state) {
    final_row["m_n"] = state->incumbent;
    final_row["x"] = point_json(state->incumbent_x);
  }
  if (!outcome.ok) final_row["diagnostic"] = diagnostic;
  final_row["config"] = config_echo;
  rows.push_back(std::move(final_row));
  return rows;
}

std::size_t CampaignResult::failed() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const CellOutcome& o) { return !o.ok; }));
}

int default_worker_count() {
  if (const char* env = std::getenv("TCGP_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw InputError("TCGP_WORKERS must be a positive integer");
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

CampaignResult run_campaign(const Campaign& c, const std::filesystem::path& store, int workers) {
  c.validate();
  if (workers < 1) throw InputError("run_campaign: workers must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(store, ec);
  if (ec) throw IoError("cannot create store directory " + store.string() + ": " + ec.message());

  struct Cell {
    const FunctionSpec* f;
    const MethodSpec* m;
    int replicate;
  };
  std::vector<Cell> cells;
  for (const auto& f : c.functions) {
    for (const auto& m : c.methods) {
      for (int r = 0; r < c.replicates; ++r) cells.push_back({&f, &m, r});
    }
  }

  CampaignResult result;
  result.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellOutcome& out = result.cells[i];
      try {
        const auto rows = run_cell(c, *cells[i].f, *cells[i].m, cells[i].replicate, out);
        std::string text;
        for (const auto& row : rows) text += row.dump() + "\n";
        write_text_file(store / out.file, text);
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        if (out.file.empty()) out.file = cell_file_name(*cells[i].f, cells[i].m->label, cells[i].replicate);
      }
    }
  };
  const int pool = std::min<int>(workers, static_cast<int>(cells.size()));
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int k = 0; k < pool; ++k) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }

  json listed = json::array();
  for (const auto& o : result.cells) {
    json e{{"file", o.file},       {"function", o.function}, {"method", o.method},
           {"replicate", o.replicate}, {"seed", o.seed},     {"status", o.ok ? "ok" : "failed"}};
    if (!o.ok) e["error"] = o.error;
    listed.push_back(std::move(e));
  }
  const json manifest{{"campaign", to_json(c)},
                      {"cells", listed},
                      {"cells_total", result.cells.size()},
                      {"cells_failed", result.failed()}};
  write_text_file(store / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

double lower_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("lower_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("lower_quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  return values[k];
}

std::vector<json> load_store_rows(const std::filesystem::path& store) {
  const json manifest = json::parse(read_text_file(store / "manifest.json"));
  std::vector<json> rows;
  for (const json& cell : manifest.at("cells")) {
    const auto path = store / cell.at("file").get<std::string>();
    if (!std::filesystem::exists(path)) continue;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) rows.push_back(json::parse(line));
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<json>& rows, const std::vector<std::string>& group_by,
                                  const std::vector<double>& targets) {
  bool by_function = false;
  bool by_method = false;
  for (const auto& key : group_by) {
    if (key == "function") {
      by_function = true;
    } else if (key == "method") {
      by_method = true;
    } else {
      throw InputError("summarize: unknown group key '" + key + "'");
    }
  }
  static const char* kMetrics[] = {"m_n", "p_mn", "twcrps", "r_t", "tks_pit"};
  using Key = std::tuple<std::string, std::string, std::string, int>;
  std::map<Key, std::vector<double>> cells;
  std::map<std::tuple<std::string, std::string, int>, std::vector<double>> incumbents;
  for (const json& row : rows) {
    const std::string type = row.value("type", "");
    if (type != "init" && type != "iteration") continue;
    const std::string f = by_function ? row.at("function").get<std::string>() : "*";
    const std::string m = by_method ? row.at("method").get<std::string>() : "*";
    const int n = row.at("n").get<int>();
    for (const char* metric : kMetrics) {
      if (row.contains(metric) && row.at(metric).is_number()) cells[{f, m, metric, n}].push_back(row.at(metric).get<double>());
    }
    incumbents[{f, m, n}].push_back(row.at("m_n").get<double>());
  }
  if (cells.empty()) throw InputError("summarize: no records in the selected group");
  std::vector<SummaryRow> out;
  for (const auto& [key, values] : cells) {
    const auto& [f, m, metric, n] = key;
    out.push_back({f, m, n, metric, lower_quantile(values, 0.1), lower_quantile(values, 0.5), lower_quantile(values, 0.9)});
  }
  for (double target : targets) {
    const std::string metric = "reach@" + format_g(target);
    for (const auto& [key, values] : incumbents) {
      const auto& [f, m, n] = key;
      const double hits = static_cast<double>(std::count_if(values.begin(), values.end(), [&](double v) { return v <= target; }));
      const double frac = hits / static_cast<double>(values.size());
      out.push_back({f, m, n, metric, frac, frac, frac});
    }
  }
  std::sort(out.begin(), out.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.function, a.method, a.metric, a.n) < std::tie(b.function, b.method, b.metric, b.n);
  });
  return out;
}

json summary_to_json(const std::vector<SummaryRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"function", r.function}, {"method", r.method}, {"n", r.n}, {"metric", r.metric},
                   {"q10", r.q10},           {"median", r.median}, {"q90", r.q90}});
  }
  return json{{"columns", {"function", "method", "n", "metric", "q10", "median", "q90"}},
              {"quantile_convention", "lower"},
              {"rows", arr}};
}

std::vector<SummaryRow> summary_from_json(const json& j) {
  std::vector<SummaryRow> rows;
  try {
    for (const json& r : j.at("rows")) {
      rows.push_back({r.at("function").get<std::string>(), r.at("method").get<std::string>(), r.at("n").get<int>(),
                      r.at("metric").get<std::string>(), r.at("q10").get<double>(), r.at("median").get<double>(),
                      r.at("q90").get<double>()});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("summary: malformed document: ") + e.what());
  }
  return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "function,method,n,metric,q10,median,q90\n";
  for (const auto& r : rows) {
    out += r.function + "," + r.method + "," + std::to_string(r.n) + "," + r.metric + "," + format_exact(r.q10) + "," +
           format_exact(r.median) + "," + format_exact(r.q90) + "\n";
  }
  return out;
}

std::vector<SummaryRow> summary_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "function,method,n,metric,q10,median,q90") {
    throw InputError("summary csv: unexpected header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw InputError("summary csv: expected 7 fields in '" + line + "'");
    try {
      rows.push_back({f[0], f[1], std::stoi(f[2]), f[3], std::stod(f[4]), std::stod(f[5]), std::stod(f[6])});
    } catch (const std::exception&) {
      throw InputError("summary csv: bad number in '" + line + "'");
    }
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << text;
    if (!out.flush()) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace tcgp
