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
#include <filesystem>
#include <sstream>

#include "anomgym/error.hpp"
#include "anomgym/gym.hpp"

namespace anomgym::gym {

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j{{"schema_version", r.schema_version},
                   {"dataset", r.dataset},
                   {"pipeline", r.pipeline},
                   {"config", space::to_json(r.config)},
                   {"n_a", r.n_a},
                   {"seed", r.seed},
                   {"status", r.ok ? "ok" : "failed"},
                   {"wall_seconds", r.wall_seconds}};
  if (r.ok) {
    j["auc_roc"] = r.auc_roc;
    j["auc_pr"] = r.auc_pr;
    j["test_scores"] = r.test_scores;
    j["test_labels"] = r.test_labels;
  } else {
    j["error_tag"] = r.error_tag;
    j["error_message"] = r.error_message;
  }
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kRecordSchemaVersion) {
    throw LoadError("run record schema version " + std::to_string(r.schema_version) +
                    " is not supported");
  }
  r.dataset = j.at("dataset").get<std::string>();
  r.pipeline = j.at("pipeline").get<std::size_t>();
  r.config = space::pipeline_from_json(j.at("config"));
  r.n_a = j.at("n_a").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_seconds = j.value("wall_seconds", 0.0);
  const auto status = j.at("status").get<std::string>();
  r.ok = status == "ok";
  if (r.ok) {
    r.auc_roc = j.at("auc_roc").get<double>();
    r.auc_pr = j.at("auc_pr").get<double>();
    r.test_scores = j.value("test_scores", std::vector<double>{});
    r.test_labels = j.value("test_labels", std::vector<int>{});
  } else {
    r.error_tag = j.value("error_tag", std::string());
    r.error_message = j.value("error_message", std::string());
  }
  return r;
}

RunRecord make_record(const select::CellKey& key, const space::PipelineConfig& cfg,
                      const select::CellResult& cell) {
  RunRecord r;
  r.dataset = key.dataset;
  r.pipeline = key.pipeline;
  r.config = cfg;
  r.n_a = key.n_a;
  r.seed = key.seed;
  r.ok = cell.ok;
  r.error_tag = cell.error_tag;
  r.error_message = cell.error_message;
  r.auc_roc = cell.auc_roc;
  r.auc_pr = cell.auc_pr;
  r.wall_seconds = cell.wall_seconds;
  r.test_scores = cell.test_scores;
  r.test_labels = cell.test_labels;
  return r;
}

select::CellResult to_cell(const RunRecord& r) {
  select::CellResult c;
  c.ok = r.ok;
  c.error_tag = r.error_tag;
  c.error_message = r.error_message;
  c.auc_roc = r.auc_roc;
  c.auc_pr = r.auc_pr;
  c.wall_seconds = r.wall_seconds;
  c.test_scores = r.test_scores;
  c.test_labels = r.test_labels;
  return c;
}

namespace {

// Parses every complete line; returns the byte offset after the last good one.
std::vector<RunRecord> parse_store(const std::filesystem::path& path, std::streamoff& good_end) {
  std::vector<RunRecord> out;
  good_end = 0;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const bool complete = !in.eof();
    if (line.empty()) {
      if (complete) good_end = in.tellg();
      continue;
    }
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      if (!complete) break;  // torn final line; a terminated bad line is corruption
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!complete) {
      out.pop_back();  // no newline yet: the writer may have been cut off
      break;
    }
    good_end = in.tellg();
  }
  return out;
}

}  // namespace

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::streamoff end = 0;
  return parse_store(path, end);
}

ResultStore::ResultStore(std::filesystem::path path) : path_(std::move(path)) {
  std::streamoff good_end = 0;
  records_ = parse_store(path_, good_end);
  if (std::filesystem::exists(path_) &&
      static_cast<std::uintmax_t>(good_end) != std::filesystem::file_size(path_)) {
    std::filesystem::resize_file(path_, static_cast<std::uintmax_t>(good_end));
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!index_.emplace(records_[i].key(), i).second) {
      throw LoadError(path_.string() + ": duplicate record for " + records_[i].dataset + "/" +
                      std::to_string(records_[i].pipeline));
    }
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw LoadError("cannot open " + path_.string() + " for appending");
}

void ResultStore::append(const RunRecord& r) {
  if (contains(r.key())) {
    throw ContractError("duplicate run record " + r.dataset + "/" + std::to_string(r.pipeline) +
                        "/n_a=" + std::to_string(r.n_a) + "/seed=" + std::to_string(r.seed));
  }
  out_ << to_json(r).dump() << '\n';
  out_.flush();
  if (!out_) throw LoadError("write to " + path_.string() + " failed");
  index_.emplace(r.key(), records_.size());
  records_.push_back(r);
}

}  // namespace anomgym::gym
