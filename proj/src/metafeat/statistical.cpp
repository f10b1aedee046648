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
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include "anomgym/error.hpp"
#include "anomgym/metafeat.hpp"
#include "anomgym/rng.hpp"
#include "metafeat_internal.hpp"

namespace anomgym::meta {
namespace {

constexpr const char* kGroupNames[kStatisticalGroups] = {
    "mean",      "median",     "var",           "min",
    "max",       "std",        "q1",            "q25",
    "q75",       "q99",        "iqr",           "normalized_mean",
    "normalized_median",       "range",         "gini",
    "median_abs_dev",          "mean_abs_dev",  "quantile_dispersion",
    "coef_variation",          "skewness",      "kurtosis",
    "moment5",   "moment6",    "moment7",       "moment8",
    "moment9",   "moment10",   "sparsity",      "anova_p",
    "normalized_entropy",      "correlation",   "covariance"};

constexpr const char* kScalarNames[kStatisticalScalars] = {
    "n", "p", "p_over_n", "log_n", "log_p", "log_n_over_p", "pct_categorical",
    "pct_outside_1_99", "pct_outside_3sigma", "normality_pass_fraction", "normality_flag"};

// Feature-level value or "undefined".
struct Stat {
  double value = 0.0;
  bool defined = true;
};

Stat undefined() { return {0.0, false}; }

Stat ratio(double num, double den) {
  if (den == 0.0 || !std::isfinite(num / den)) return undefined();
  return {num / den, true};
}

struct Column {
  std::vector<double> x;       // original order
  std::vector<double> sorted;
  double mean = 0.0;
  double m2 = 0.0;  // population variance
};

Column make_column(const Matrix& m, std::size_t c) {
  Column col;
  col.x = m.column(c);
  col.sorted = col.x;
  std::sort(col.sorted.begin(), col.sorted.end());
  const auto n = static_cast<double>(col.x.size());
  col.mean = std::accumulate(col.x.begin(), col.x.end(), 0.0) / n;
  for (double v : col.x) col.m2 += (v - col.mean) * (v - col.mean);
  col.m2 /= n;
  return col;
}

double central_moment(const Column& c, int k) {
  double s = 0.0;
  for (double v : c.x) s += std::pow(v - c.mean, k);
  return s / static_cast<double>(c.x.size());
}

Stat standardized_moment(const Column& c, int k) {
  if (c.m2 <= 0.0) return undefined();
  return ratio(central_moment(c, k), std::pow(c.m2, k / 2.0));
}

double gini_of_shifted(const std::vector<double>& sorted) {
  // Gini of x - min(x): sum_i (2i - n - 1) y_(i) / (n sum y)
  const double lo = sorted.front();
  const auto n = static_cast<double>(sorted.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double y = sorted[i] - lo;
    total += y;
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * y;
  }
  return total == 0.0 ? std::nan("") : weighted / (n * total);
}

double anova_p(const std::vector<double>& x, const std::vector<std::uint8_t>& group) {
  double sum[2] = {0, 0};
  double cnt[2] = {0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum[group[i]] += x[i];
    cnt[group[i]] += 1;
  }
  const double grand = (sum[0] + sum[1]) / (cnt[0] + cnt[1]);
  const double mean0 = sum[0] / cnt[0];
  const double mean1 = sum[1] / cnt[1];
  double within = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mu = group[i] ? mean1 : mean0;
    within += (x[i] - mu) * (x[i] - mu);
  }
  const double between = cnt[0] * (mean0 - grand) * (mean0 - grand) +
                         cnt[1] * (mean1 - grand) * (mean1 - grand);
  const double df_within = cnt[0] + cnt[1] - 2.0;
  if (within <= 0.0) return std::nan("");
  const double f = between / (within / df_within);
  boost::math::fisher_f dist(1.0, df_within);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double normalized_entropy(const std::vector<double>& sorted) {
  const auto n = static_cast<double>(sorted.size());
  double h = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double p = static_cast<double>(j - i) / n;
    h -= p * std::log2(p);
    i = j;
  }
  return h / std::log2(n);
}

std::size_t unique_count(const std::vector<double>& sorted) {
  std::size_t u = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) ++u;
  }
  return u;
}

Stat pearson(const Column& a, const Column& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) s += (a.x[i] - a.mean) * (b.x[i] - b.mean);
  s /= static_cast<double>(a.x.size());
  if (a.m2 <= 0.0 || b.m2 <= 0.0) return undefined();
  return ratio(s, std::sqrt(a.m2 * b.m2));
}

double sample_covariance(const Column& a, const Column& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) s += (a.x[i] - a.mean) * (b.x[i] - b.mean);
  return s / static_cast<double>(a.x.size() - 1);
}

}  // namespace

double quantile(const std::vector<double>& sorted, double q) {
  // Linear interpolation between closest ranks.
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void append_group_names(std::vector<std::string>& out, const std::string& prefix) {
  for (const char* agg : {"min", "max", "mean", "std", "skew", "kurt", "imputed"}) {
    out.push_back(prefix + "." + agg);
  }
}

void statistical_names(std::vector<std::string>& out) {
  for (const char* g : kGroupNames) append_group_names(out, std::string("stat.") + g);
  for (const char* s : kScalarNames) out.push_back(std::string("stat.") + s);
}

std::vector<double> aggregate(const std::vector<double>& raw, bool any_imputed) {
  std::vector<double> out(kAggregateWidth, 0.0);
  bool flag = any_imputed;
  std::vector<double> values;
  values.reserve(raw.size());
  for (double v : raw) {
    if (std::isfinite(v)) values.push_back(v);
    else flag = true;
  }
  if (values.empty()) {
    out[6] = 1.0;
    return out;
  }
  const auto n = static_cast<double>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out[0] = *lo;
  out[1] = *hi;
  out[2] = mean;
  out[3] = std::sqrt(m2);
  if (m2 > 0.0 && values.size() >= 2 && *hi > *lo) {
    out[4] = m3 / std::pow(m2, 1.5);
    out[5] = m4 / (m2 * m2) - 3.0;
  } else {
    flag = true;
  }
  for (double& v : out) {
    if (!std::isfinite(v)) {
      v = 0.0;
      flag = true;
    }
  }
  out[6] = flag ? 1.0 : 0.0;
  return out;
}

double normality_p_value(const std::vector<double>& column) {
  const auto n = static_cast<double>(column.size());
  if (column.size() < 8) return std::nan("");
  double mean = std::accumulate(column.begin(), column.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : column) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 0.0) return std::nan("");
  // skewness test
  const double b1 = m3 / std::pow(m2, 1.5);
  double y = b1 * std::sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)));
  const double beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) /
                       ((n - 2) * (n + 5) * (n + 7) * (n + 9));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  if (y == 0.0) y = 1.0;
  const double zs = delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));
  // kurtosis test
  const double b2 = m4 / (m2 * m2);
  const double e = 3.0 * (n - 1) / (n + 1);
  const double varb2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) * (n + 1) * (n + 3) * (n + 5));
  const double xk = (b2 - e) / std::sqrt(varb2);
  const double sqrtbeta1 = 6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9)) *
                           std::sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3)));
  const double a = 6.0 + 8.0 / sqrtbeta1 *
                             (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + xk * std::sqrt(2.0 / (a - 4.0));
  if (denom == 0.0) return std::nan("");
  const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  const double zk = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
  // chi-squared(2) survival function
  return std::exp(-0.5 * (zs * zs + zk * zk));
}

std::vector<double> statistical_features(const Matrix& x, std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 4) throw ContractError("statistical_features needs at least 4 rows");
  if (p == 0) throw ContractError("statistical_features needs at least one feature");
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw ContractError("statistical_features: non-finite input");
  }
  std::vector<Column> cols;
  cols.reserve(p);
  for (std::size_t c = 0; c < p; ++c) cols.push_back(make_column(x, c));

  // ANOVA grouping: a seeded random half of the rows.
  std::vector<std::uint8_t> group(n, 0);
  {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, "metafeat", "anova"));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < n / 2; ++i) group[idx[i]] = 1;
  }

  std::vector<std::vector<Stat>> per(kStatisticalGroups);
  double outside_1_99 = 0.0;
  double outside_3sigma = 0.0;
  double normal_pass = 0.0;
  bool normality_imputed = false;
  const auto nd = static_cast<double>(n);

  for (const Column& c : cols) {
    const auto& s = c.sorted;
    const double sd = std::sqrt(c.m2);
    const double lo = s.front();
    const double hi = s.back();
    const double range = hi - lo;
    const double q1 = quantile(s, 0.01), q25 = quantile(s, 0.25), q75 = quantile(s, 0.75),
                 q99 = quantile(s, 0.99), median = quantile(s, 0.5);
    std::vector<double> abs_dev_median(n);
    double mean_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      abs_dev_median[i] = std::abs(c.x[i] - median);
      mean_abs += std::abs(c.x[i] - c.mean);
    }
    std::sort(abs_dev_median.begin(), abs_dev_median.end());
    std::size_t k = 0;
    per[k++].push_back({c.mean});
    per[k++].push_back({median});
    per[k++].push_back({c.m2});
    per[k++].push_back({lo});
    per[k++].push_back({hi});
    per[k++].push_back({sd});
    per[k++].push_back({q1});
    per[k++].push_back({q25});
    per[k++].push_back({q75});
    per[k++].push_back({q99});
    per[k++].push_back({q75 - q25});
    per[k++].push_back(ratio(c.mean - lo, range));
    per[k++].push_back(ratio(median - lo, range));
    per[k++].push_back({range});
    {
      const double g = gini_of_shifted(s);
      per[k++].push_back(std::isnan(g) ? undefined() : Stat{g});
    }
    per[k++].push_back({quantile(abs_dev_median, 0.5)});
    per[k++].push_back({mean_abs / nd});
    per[k++].push_back(ratio(q75 - q25, q75 + q25));
    per[k++].push_back(ratio(sd, std::abs(c.mean)));
    per[k++].push_back(standardized_moment(c, 3));
    {
      Stat kurt = standardized_moment(c, 4);
      if (kurt.defined) kurt.value -= 3.0;
      per[k++].push_back(kurt);
    }
    for (int m = 5; m <= 10; ++m) per[k++].push_back(standardized_moment(c, m));
    per[k++].push_back({static_cast<double>(unique_count(s)) / nd});
    {
      const double pv = anova_p(c.x, group);
      per[k++].push_back(std::isnan(pv) ? undefined() : Stat{pv});
    }
    per[k++].push_back({normalized_entropy(s)});

    std::size_t out_q = 0;
    std::size_t out_s = 0;
    for (double v : c.x) {
      if (v < q1 || v > q99) ++out_q;
      if (sd > 0.0 && std::abs(v - c.mean) > 3.0 * sd) ++out_s;
    }
    outside_1_99 += static_cast<double>(out_q) / nd;
    outside_3sigma += static_cast<double>(out_s) / nd;
    const double pv = normality_p_value(c.x);
    if (std::isnan(pv)) {
      normality_imputed = true;
    } else if (pv > kNormalityAlpha) {
      normal_pass += 1.0;
    }
  }

  // Feature pairs: all of them up to kMaxFeaturePairs, otherwise a seeded sample.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) pairs.emplace_back(a, b);
  }
  if (p > kMaxFeaturePairs) {
    Rng rng(derive_seed(seed, "metafeat", "pairs"));
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(kMaxFeaturePairs);
    std::sort(pairs.begin(), pairs.end());
  }
  const std::size_t corr_group = kStatisticalGroups - 2;
  for (const auto& [a, b] : pairs) {
    per[corr_group].push_back(pearson(cols[a], cols[b]));
    per[corr_group + 1].push_back({sample_covariance(cols[a], cols[b])});
  }

  std::vector<double> out;
  out.reserve(kStatisticalWidth);
  for (const auto& stats : per) {
    std::vector<double> vals;
    bool imputed = false;
    for (const Stat& s : stats) {
      vals.push_back(s.defined ? s.value : 0.0);
      imputed = imputed || !s.defined;
    }
    const auto agg = aggregate(vals, imputed);
    out.insert(out.end(), agg.begin(), agg.end());
  }
  const auto pd = static_cast<double>(p);
  out.push_back(nd);
  out.push_back(pd);
  out.push_back(pd / nd);
  out.push_back(std::log(nd));
  out.push_back(std::log(pd));
  out.push_back(std::log(nd / pd));
  out.push_back(0.0);  // every ingested feature is numeric
  out.push_back(outside_1_99 / pd);
  out.push_back(outside_3sigma / pd);
  out.push_back(normal_pass / pd);
  out.push_back(normality_imputed ? 1.0 : 0.0);
  return out;
}

}  // namespace anomgym::meta
