#include "dperm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dperm/rng.hpp"

namespace dperm {
namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                           ": " + what);
}

double parse_double(const std::string& tok, std::size_t line_no) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    parse_fail(line_no, "not a number: '" + tok + "'");
  }
  if (used != tok.size()) parse_fail(line_no, "trailing junk in '" + tok + "'");
  if (!std::isfinite(v)) parse_fail(line_no, "non-finite value '" + tok + "'");
  return v;
}

// Maps raw labels to contiguous ids by sorted order of the distinct values.
void assign_labels(const std::vector<double>& raw, Dataset& ds) {
  std::vector<double> distinct(raw);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw std::runtime_error("dataset has fewer than 2 distinct labels");
  }
  ds.num_classes = static_cast<std::int32_t>(distinct.size());
  ds.raw_label_values = distinct;
  ds.labels.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto it = std::lower_bound(distinct.begin(), distinct.end(), raw[i]);
    ds.labels[i] = static_cast<std::int32_t>(it - distinct.begin());
  }
}

}  // namespace

double FeatureRow::norm() const {
  double s = 0.0;
  for (const auto& [idx, v] : entries) s += v * v;
  return std::sqrt(s);
}

double FeatureRow::dot(const double* w) const {
  double s = 0.0;
  for (const auto& [idx, v] : entries) s += w[idx] * v;
  return s;
}

void validate(const Dataset& ds) {
  if (ds.n <= 0) throw std::runtime_error("dataset invariant: n > 0");
  if (ds.p <= 0) throw std::runtime_error("dataset invariant: p > 0");
  if (ds.num_classes < 2) {
    throw std::runtime_error("dataset invariant: num_classes >= 2");
  }
  if (ds.rows.size() != static_cast<std::size_t>(ds.n) ||
      ds.labels.size() != static_cast<std::size_t>(ds.n)) {
    throw std::runtime_error("dataset invariant: len(rows) == len(labels) == n");
  }
  for (std::int32_t i = 0; i < ds.n; ++i) {
    const FeatureRow& r = ds.rows[i];
    if (r.dim != ds.p) throw std::runtime_error("dataset invariant: row dim == p");
    std::int32_t prev = -1;
    for (const auto& [idx, v] : r.entries) {
      if (idx <= prev || idx >= ds.p) {
        throw std::runtime_error(
            "dataset invariant: indices strictly increasing in [0, p)");
      }
      if (v == 0.0 || !std::isfinite(v)) {
        throw std::runtime_error("dataset invariant: stored values nonzero finite");
      }
      prev = idx;
    }
    if (ds.labels[i] < 0 || ds.labels[i] >= ds.num_classes) {
      throw std::runtime_error("dataset invariant: label < num_classes");
    }
  }
}

Dataset parse_libsvm(std::istream& in, std::optional<std::int32_t> p_hint) {
  Dataset ds;
  std::vector<double> raw_labels;
  std::int32_t max_index = 0;  // exclusive upper bound, 0-based
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    raw_labels.push_back(parse_double(tok, line_no));
    FeatureRow row;
    std::int32_t prev_idx = -1;
    while (ls >> tok) {
      std::size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        parse_fail(line_no, "expected idx:val, got '" + tok + "'");
      }
      std::int64_t idx;
      try {
        std::size_t used = 0;
        idx = std::stoll(tok.substr(0, colon), &used);
        if (used != colon) parse_fail(line_no, "bad index in '" + tok + "'");
      } catch (const std::exception&) {
        parse_fail(line_no, "bad index in '" + tok + "'");
      }
      if (idx < 1) parse_fail(line_no, "indices are 1-based; got " + std::to_string(idx));
      double v = parse_double(tok.substr(colon + 1), line_no);
      std::int32_t zero_based = static_cast<std::int32_t>(idx - 1);
      if (zero_based <= prev_idx) {
        parse_fail(line_no, "indices not strictly increasing");
      }
      prev_idx = zero_based;
      if (v != 0.0) row.entries.emplace_back(zero_based, v);
      max_index = std::max(max_index, static_cast<std::int32_t>(idx));
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw std::runtime_error("empty dataset");
  ds.n = static_cast<std::int32_t>(ds.rows.size());
  ds.p = std::max(max_index, p_hint.value_or(0));
  if (ds.p <= 0) throw std::runtime_error("dataset has no features");
  for (FeatureRow& r : ds.rows) r.dim = ds.p;
  assign_labels(raw_labels, ds);
  validate(ds);
  return ds;
}

Dataset parse_libsvm_file(const std::string& path,
                          std::optional<std::int32_t> p_hint) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(in, p_hint);
}

Dataset parse_csv(std::istream& in, bool has_header) {
  Dataset ds;
  std::vector<double> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (has_header && line_no == 1) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() < 2) parse_fail(line_no, "need at least one feature and a label");
    if (expected_cols == 0) {
      expected_cols = fields.size();
    } else if (fields.size() != expected_cols) {
      parse_fail(line_no, "inconsistent column count");
    }
    FeatureRow row;
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
      double v = parse_double(fields[j], line_no);
      if (v != 0.0) row.entries.emplace_back(static_cast<std::int32_t>(j), v);
    }
    raw_labels.push_back(parse_double(fields.back(), line_no));
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw std::runtime_error("empty dataset");
  ds.n = static_cast<std::int32_t>(ds.rows.size());
  ds.p = static_cast<std::int32_t>(expected_cols - 1);
  for (FeatureRow& r : ds.rows) r.dim = ds.p;
  assign_labels(raw_labels, ds);
  validate(ds);
  return ds;
}

Dataset parse_csv_file(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_csv(in, has_header);
}

void serialize_libsvm(const Dataset& ds, std::ostream& out) {
  char buf[64];
  for (std::int32_t i = 0; i < ds.n; ++i) {
    double raw = ds.raw_label_values.empty()
                     ? static_cast<double>(ds.labels[i])
                     : ds.raw_label_values[ds.labels[i]];
    std::snprintf(buf, sizeof(buf), "%.17g", raw);
    out << buf;
    for (const auto& [idx, v] : ds.rows[i].entries) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", idx + 1, v);
      out << buf;
    }
    out << '\n';
  }
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             const SplitSpec& spec) {
  validate(ds);
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::runtime_error("train_fraction must be in (0, 1)");
  }
  std::int32_t n_train = static_cast<std::int32_t>(
      std::floor(spec.train_fraction * static_cast<double>(ds.n)));
  if (n_train < 1 || ds.n - n_train < 1) {
    throw std::runtime_error("split would leave an empty side");
  }
  std::vector<std::int32_t> perm(ds.n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(spec.seed);
  rng.shuffle(perm);
  auto take = [&](std::int32_t lo, std::int32_t hi) {
    Dataset part;
    part.p = ds.p;
    part.num_classes = ds.num_classes;
    part.raw_label_values = ds.raw_label_values;
    part.n = hi - lo;
    part.rows.reserve(part.n);
    part.labels.reserve(part.n);
    for (std::int32_t k = lo; k < hi; ++k) {
      part.rows.push_back(ds.rows[perm[k]]);
      part.labels.push_back(ds.labels[perm[k]]);
    }
    return part;
  };
  return {take(0, n_train), take(n_train, ds.n)};
}

Dataset row_l2_normalize(const Dataset& ds) {
  Dataset out = ds;
  for (FeatureRow& r : out.rows) {
    double nrm = r.norm();
    if (nrm == 0.0 || std::abs(nrm - 1.0) <= 1e-12) continue;
    for (auto& [idx, v] : r.entries) v /= nrm;
  }
  return out;
}

}  // namespace dperm
