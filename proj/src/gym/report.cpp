// Copyright 2026 The anomgym Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/gym.hpp"

namespace anomgym::gym {
namespace {

std::ofstream open_csv(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw LoadError("cannot write " + file.string());
  out.precision(17);
  return out;
}

void write_choice_rows(std::ostream& out, const std::vector<ChoiceSummary>& rows) {
  for (const ChoiceSummary& r : rows) {
    const auto& info = space::dimension_info(r.dimension);
    out << info.key << ',' << info.choices[r.choice] << ',' << r.n_a << ',';
    if (r.cells > r.failed) {
      out << r.mean_auc_roc << ',' << r.mean_auc_pr;
    } else {
      out << ',';  // nothing to average
    }
    out << ',' << r.mean_rank << ',' << r.mean_inverse_rank << ',' << r.cells << ',' << r.failed
        << '\n';
  }
}

constexpr const char* kChoiceHeader =
    "dimension,choice,n_a,mean_auc_roc,mean_auc_pr,mean_rank,mean_inverse_rank,cells,failed_cells\n";

}  // namespace

std::vector<CellSummary> summarize_cells(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;  // dataset, n_a, pipeline
  std::map<Key, CellSummary> cells;
  std::map<Key, std::size_t> ok_repeats;
  for (const RunRecord& r : records) {
    CellSummary& c = cells[{r.dataset, r.n_a, r.pipeline}];
    c.dataset = r.dataset;
    c.n_a = r.n_a;
    c.pipeline = r.pipeline;
    c.config = r.config;
    c.repeats += 1;
    if (r.ok) {
      c.auc_roc += r.auc_roc;
      c.auc_pr += r.auc_pr;
      ok_repeats[{r.dataset, r.n_a, r.pipeline}] += 1;
    } else {
      c.failed = true;
    }
  }
  for (auto& [key, c] : cells) {
    const std::size_t ok = ok_repeats[key];
    if (ok > 0) {
      c.auc_roc /= static_cast<double>(ok);
      c.auc_pr /= static_cast<double>(ok);
    }
  }
  // Ranks within each (dataset, n_a) row.
  std::map<std::pair<std::string, std::size_t>, std::vector<CellSummary*>> rows;
  for (auto& [key, c] : cells) rows[{c.dataset, c.n_a}].push_back(&c);
  for (auto& [row_key, members] : rows) {
    std::vector<double> raw;
    std::vector<std::uint8_t> failed;
    for (const CellSummary* c : members) {
      raw.push_back(c->auc_roc);
      failed.push_back(c->failed ? 1 : 0);
    }
    if (std::all_of(failed.begin(), failed.end(), [](std::uint8_t f) { return f != 0; })) {
      for (CellSummary* c : members) {
        c->rank = 1.0;
        c->inverse_rank = 0.0;
      }
      continue;
    }
    const auto rank = metrics::rank_normalize(raw, failed);
    for (std::size_t i = 0; i < members.size(); ++i) {
      members[i]->rank = rank[i];
      members[i]->inverse_rank = 1.0 - rank[i];
    }
  }
  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (auto& [key, c] : cells) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), [](const CellSummary& a, const CellSummary& b) {
    return std::tie(a.dataset, a.pipeline, a.n_a) < std::tie(b.dataset, b.pipeline, b.n_a);
  });
  return out;
}

std::vector<ChoiceSummary> summarize_choices(const std::vector<CellSummary>& cells,
                                             space::Dimension dim,
                                             const std::vector<std::string>& datasets) {
  std::map<std::pair<std::size_t, std::size_t>, ChoiceSummary> groups;  // (choice, n_a)
  for (const CellSummary& c : cells) {
    if (!datasets.empty() && std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end()) {
      continue;
    }
    const std::size_t choice = c.config.choice(dim);
    ChoiceSummary& g = groups[{choice, c.n_a}];
    g.dimension = dim;
    g.choice = choice;
    g.n_a = c.n_a;
    g.cells += 1;
    g.mean_rank += c.rank;
    g.mean_inverse_rank += c.inverse_rank;
    if (c.failed) {
      g.failed += 1;
    } else {
      g.mean_auc_roc += c.auc_roc;
      g.mean_auc_pr += c.auc_pr;
    }
  }
  std::vector<ChoiceSummary> out;
  for (auto& [key, g] : groups) {
    const auto n = static_cast<double>(g.cells);
    const auto ok = static_cast<double>(g.cells - g.failed);
    g.mean_rank /= n;
    g.mean_inverse_rank /= n;
    if (ok > 0) {
      g.mean_auc_roc /= ok;
      g.mean_auc_pr /= ok;
    }
    out.push_back(g);
  }
  return out;
}

void write_dimension_summaries(const std::vector<RunRecord>& records,
                               const std::filesystem::path& out_dir) {
  const auto cells = summarize_cells(records);
  for (space::Dimension dim : space::all_dimensions()) {
    auto out = open_csv(out_dir / ("summary_" + std::string(space::dimension_info(dim).key) + ".csv"));
    out << kChoiceHeader;
    write_choice_rows(out, summarize_choices(cells, dim));
  }
}

ReportKind report_kind_from_string(const std::string& s) {
  if (s == "all") return ReportKind::kAll;
  if (s == "pipelines") return ReportKind::kPipelines;
  if (s == "choices") return ReportKind::kChoices;
  throw UsageError("unknown report kind '" + s + "' (expected all, pipelines or choices)");
}

std::vector<std::filesystem::path> report(const std::filesystem::path& results_dir, ReportKind kind) {
  const auto store = results_dir / "records.jsonl";
  if (!std::filesystem::exists(store)) throw UsageError("no results store at " + store.string());
  const auto records = read_records(store);
  if (records.empty()) throw UsageError("results store " + store.string() + " is empty");
  const auto cells = summarize_cells(records);
  std::vector<std::filesystem::path> written;

  if (kind == ReportKind::kAll || kind == ReportKind::kPipelines) {
    const auto wide = results_dir / "report_pipelines.csv";
    auto out = open_csv(wide);
    out << "dataset,pipeline,n_a";
    for (space::Dimension dim : space::all_dimensions()) out << ',' << space::dimension_info(dim).key;
    out << ",auc_roc,auc_pr,rank,inverse_rank,failed,repeats\n";
    for (const CellSummary& c : cells) {
      out << c.dataset << ',' << c.pipeline << ',' << c.n_a;
      for (space::Dimension dim : space::all_dimensions()) out << ',' << c.config.choice_name(dim);
      out << ',' << c.auc_roc << ',' << c.auc_pr << ',' << c.rank << ',' << c.inverse_rank << ','
          << (c.failed ? 1 : 0) << ',' << c.repeats << '\n';
    }
    written.push_back(wide);

    const auto long_file = results_dir / "report_long.csv";
    auto lng = open_csv(long_file);
    lng << "dataset,pipeline,n_a,metric,value\n";
    for (const CellSummary& c : cells) {
      const std::pair<const char*, double> metrics[] = {
          {"auc_roc", c.auc_roc}, {"auc_pr", c.auc_pr}, {"rank", c.rank}, {"inverse_rank", c.inverse_rank}};
      for (const auto& [name, value] : metrics) {
        if (c.failed && (name == std::string("auc_roc") || name == std::string("auc_pr"))) continue;
        lng << c.dataset << ',' << c.pipeline << ',' << c.n_a << ',' << name << ',' << value << '\n';
      }
    }
    written.push_back(long_file);
  }
  if (kind == ReportKind::kAll || kind == ReportKind::kChoices) {
    const auto file = results_dir / "report_choices.csv";
    auto out = open_csv(file);
    out << kChoiceHeader;
    for (space::Dimension dim : space::all_dimensions()) write_choice_rows(out, summarize_choices(cells, dim));
    written.push_back(file);
  }
  return written;
}

}  // namespace anomgym::gym
