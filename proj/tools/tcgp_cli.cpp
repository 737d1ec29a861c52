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

// Command-line driver: run campaigns, summarize run stores, emit plot data.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcgp/benchfns.hpp"
#include "tcgp/error.hpp"
#include "tcgp/harness.hpp"

namespace {

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    tcgp::write_text_file(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tcgp: lower-tail calibrated GP optimization campaigns"};
  app.require_subcommand(1);

  std::string config_path;
  std::string store_out;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run a campaign described by a JSON config");
  run->add_option("config", config_path, "Campaign config file")->required();
  run->add_option("-o,--store", store_out, "Run store directory (default runs/<campaign name>)");
  run->add_option("-w,--workers", workers, "Worker threads (default TCGP_WORKERS or hardware concurrency)");

  std::string store_in;
  std::vector<std::string> group_by{"function", "method"};
  std::vector<double> targets;
  std::string summary_out;
  auto* summarize = app.add_subcommand("summarize", "Quantile summaries of a run store");
  summarize->add_option("store", store_in, "Run store directory")->required();
  summarize->add_option("--by", group_by, "Group keys among function, method")->delimiter(',');
  summarize->add_option("--target", targets, "Target level for the reach fraction (repeatable)");
  summarize->add_option("-o,--output", summary_out, "Summary JSON path (default stdout)");

  std::string summary_in;
  std::string format = "csv";
  std::string emit_out;
  auto* emit = app.add_subcommand("emit", "Emit plot data from a summary");
  emit->add_option("summary", summary_in, "Summary JSON produced by summarize")->required();
  emit->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  emit->add_option("-o,--output", emit_out, "Output path (default stdout)");

  auto* list = app.add_subcommand("list-functions", "List the benchmark registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const tcgp::Campaign campaign = tcgp::load_campaign(config_path);
      const std::string store = store_out.empty() ? "runs/" + campaign.name : store_out;
      const int pool = workers > 0 ? workers : tcgp::default_worker_count();
      const tcgp::CampaignResult result = tcgp::run_campaign(campaign, store, pool);
      for (const auto& cell : result.cells) {
        if (!cell.ok) std::cerr << "failed: " << cell.file << ": " << cell.error << "\n";
      }
      std::cout << "cells: " << result.cells.size() << " failed: " << result.failed() << " store: " << store << "\n";
      return result.failed() == 0 ? 0 : 1;
    }
    if (*summarize) {
      const auto rows = tcgp::summarize(tcgp::load_store_rows(store_in), group_by, targets);
      write_or_print(summary_out, tcgp::summary_to_json(rows).dump(2) + "\n");
      return 0;
    }
    if (*emit) {
      const auto rows = tcgp::summary_from_json(nlohmann::json::parse(tcgp::read_text_file(summary_in)));
      if (rows.empty()) throw tcgp::InputError("emit: summary has no rows");
      write_or_print(emit_out, format == "csv" ? tcgp::summary_to_csv(rows) : tcgp::summary_to_json(rows).dump(2) + "\n");
      return 0;
    }
    if (*list) {
      for (const auto& info : tcgp::list_test_functions()) {
        std::cout << info.name << "\t";
        if (info.dims.empty()) {
          std::cout << "d>=" << info.min_dim;
        } else {
          for (std::size_t i = 0; i < info.dims.size(); ++i) std::cout << (i ? "," : "") << "d=" << info.dims[i];
        }
        std::cout << "\t" << info.domain << "\n";
      }
      return 0;
    }
  } catch (const tcgp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tcgp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
