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

#ifndef TCGP_HARNESS_HPP
#define TCGP_HARNESS_HPP

// Replicated optimization campaigns: configuration, the on-disk run store,
// per-cell metric evaluation, summaries and plot-data emission.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcgp/bo.hpp"
#include "tcgp/metrics.hpp"

namespace tcgp {

struct FunctionSpec {
  std::string name;
  std::size_t dim = 0;

  /// "<name>_d<dim>", used in file names and summaries.
  std::string label() const;
};

struct MethodSpec {
  std::string label;
  BoConfig config;
};

/// Which diagnostics are attached to which rows. A row with n evaluations is
/// scheduled when n >= start and (n - start) is a multiple of every.
struct MetricSchedule {
  bool p_mn = true;
  bool twcrps = false;
  bool r_t = false;
  bool tks_pit = false;
  int start = 0;
  int every = 1;
  int probes = 1000;
  int tks_points = 900;
  int particles = 1000;
  int crps_draws = 1000;
  SubsetOptions subset;

  bool scheduled(int n) const { return n >= start && (n - start) % every == 0; }
  bool any_calibration() const { return twcrps || r_t || tks_pit; }
};

struct Campaign {
  std::string name = "campaign";
  std::vector<FunctionSpec> functions;
  std::vector<MethodSpec> methods;
  int replicates = 1;
  MetricSchedule metrics;
  std::uint64_t base_seed = 0;
  /// Target levels for the reach fraction in summaries.
  std::vector<double> targets;

  void validate() const;
};

/// Builds a campaign from its JSON form. Method entries inherit every key of
/// the top-level "defaults" object and may override any of them. Unknown keys
/// are rejected.
Campaign parse_campaign(const nlohmann::json& j);
Campaign load_campaign(const std::filesystem::path& path);

nlohmann::json to_json(const BoConfig& c);
/// Fully resolved campaign, every default made explicit.
nlohmann::json to_json(const Campaign& c);

/// "<function>_d<dim>__<method>__r<replicate>.ndjson"
std::string cell_file_name(const FunctionSpec& f, const std::string& method, int replicate);

struct CellOutcome {
  std::string file;
  std::string function;
  std::string method;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
};

/// Runs one (function, method, replicate) cell and returns its NDJSON rows.
std::vector<nlohmann::json> run_cell(const Campaign& c, const FunctionSpec& f, const MethodSpec& m, int replicate,
                                     CellOutcome& outcome);

struct CampaignResult {
  std::vector<CellOutcome> cells;
  std::size_t failed() const;
};

/// Number of workers from TCGP_WORKERS, else the hardware concurrency.
int default_worker_count();

/// Runs every cell on a pool of `workers` threads, writing one NDJSON file
/// per cell and manifest.json into `store`. Failed cells are recorded and the
/// remaining cells still run.
CampaignResult run_campaign(const Campaign& c, const std::filesystem::path& store, int workers);

struct SummaryRow {
  std::string function;
  std::string method;
  int n = 0;
  std::string metric;
  double q10 = 0.0;
  double median = 0.0;
  double q90 = 0.0;

  bool operator==(const SummaryRow&) const = default;
};

/// Lower-interpolation empirical quantile: sorted[floor(q (N - 1))].
double lower_quantile(std::vector<double> values, double q);

/// Reads every cell file listed in the store manifest.
std::vector<nlohmann::json> load_store_rows(const std::filesystem::path& store);

/// Quantiles across replicates per (group, n, metric). `group_by` holds any
/// of "function" and "method"; a column left out of the grouping reads "*".
/// Each target adds a metric "reach@<target>" whose three columns hold the
/// fraction of replicates with m_n <= target.
std::vector<SummaryRow> summarize(const std::vector<nlohmann::json>& rows, const std::vector<std::string>& group_by,
                                  const std::vector<double>& targets = {});

nlohmann::json summary_to_json(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_json(const nlohmann::json& j);

/// Long CSV with header function,method,n,metric,q10,median,q90; numbers %.17g.
std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_csv(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace tcgp

#endif  // TCGP_HARNESS_HPP
