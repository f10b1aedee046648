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
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "anomgym/datahub.hpp"
#include "anomgym/error.hpp"

namespace anomgym::data {
namespace {

std::string trim(std::string s) {
  const char* ws = " \t\r\n\"";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t Dataset::anomalies() const noexcept {
  std::size_t c = 0;
  for (int v : y) c += v == 1;
  return c;
}

void Dataset::validate() const {
  if (y.size() != x.rows()) {
    throw LoadError(name + ": " + std::to_string(x.rows()) + " rows but " +
                    std::to_string(y.size()) + " labels");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(r, c))) {
        throw LoadError(name + ": non-finite value at row " + std::to_string(r) + ", column " +
                        std::to_string(c));
      }
    }
  }
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (y[r] != 0 && y[r] != 1) {
      throw LoadError(name + ": label at row " + std::to_string(r) + " is not 0/1");
    }
  }
  const std::size_t a = anomalies();
  if (a < 2) throw LoadError(name + ": fewer than 2 anomalies");
  if (y.size() - a < 2) throw LoadError(name + ": fewer than 2 normal samples");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  Dataset ds;
  ds.name = path.stem().string();
  ds.provenance = "loaded";
  std::string line;
  if (!std::getline(in, line)) throw LoadError(path.string() + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  if (header.empty() || header.back() != "label") {
    throw LoadError(path.string() + ": missing label column (last header must be 'label')");
  }
  const std::size_t d = header.size() - 1;
  if (d == 0) throw LoadError(path.string() + ": no feature columns");
  std::vector<double> values;
  std::size_t row = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw LoadError(path.string() + ": line " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      char* end = nullptr;
      errno = 0;
      const double v = cell.empty() ? NAN : std::strtod(cell.c_str(), &end);
      const bool parsed = !cell.empty() && end == cell.c_str() + cell.size() && errno != ERANGE;
      const std::string where = "row " + std::to_string(row) + ", column '" + header[c] + "'";
      if (!parsed && !cell.empty() && end != cell.c_str() + cell.size()) {
        throw LoadError(path.string() + ": non-numeric cell '" + cell + "' at " + where);
      }
      if (!std::isfinite(v)) throw LoadError(path.string() + ": NaN or infinite value at " + where);
      if (c + 1 == cells.size()) {
        if (v != 0.0 && v != 1.0) throw LoadError(path.string() + ": label at " + where + " is not 0/1");
        ds.y.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
    ++row;
  }
  ds.x = Matrix(row, d, std::move(values));
  try {
    ds.validate();
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  for (std::size_t c = 0; c < ds.d(); ++c) out << "f" << c << ',';
  out << "label\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < ds.n(); ++r) {
    for (std::size_t c = 0; c < ds.d(); ++c) out << ds.x(r, c) << ',';
    out << ds.y[r] << '\n';
  }
}

}  // namespace anomgym::data
