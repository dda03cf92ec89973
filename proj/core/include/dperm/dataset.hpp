#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dperm {

// One sparse example: strictly increasing 0-based indices, no stored zeros.
struct FeatureRow {
  std::vector<std::pair<std::int32_t, double>> entries;
  std::int32_t dim = 0;

  double norm() const;
  double dot(const double* w) const;

  bool operator==(const FeatureRow&) const = default;
};

struct Dataset {
  std::vector<FeatureRow> rows;
  std::vector<std::int32_t> labels;      // contiguous class ids 0..num_classes-1
  std::int32_t n = 0;
  std::int32_t p = 0;
  std::int32_t num_classes = 0;
  std::vector<double> raw_label_values;  // sorted distinct labels from the source

  bool operator==(const Dataset&) const = default;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

// Throws std::runtime_error naming the first violated invariant.
void validate(const Dataset& ds);

// LIBSVM text: "<label> <idx>:<val> ...", indices 1-based in the file and
// mapped to 0-based here. Feature dimension is the larger of the max observed
// index and p_hint. Raw labels are remapped to 0..K-1 by sorted order of the
// distinct values ({-1,+1} becomes {0,1}).
Dataset parse_libsvm(std::istream& in, std::optional<std::int32_t> p_hint = {});
Dataset parse_libsvm_file(const std::string& path,
                          std::optional<std::int32_t> p_hint = {});

// CSV: numeric fields, last column is the label; has_header skips line 1.
Dataset parse_csv(std::istream& in, bool has_header);
Dataset parse_csv_file(const std::string& path, bool has_header);

// Writes labels as their raw source values so a reparse is an exact roundtrip.
void serialize_libsvm(const Dataset& ds, std::ostream& out);

// Deterministic permutation from the seed; first floor(train_fraction * n)
// records form the train side. Throws if either side would be empty.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             const SplitSpec& spec);

// Scales each nonzero row to unit L2 norm. Zero rows and rows already within
// 1e-12 of unit norm are returned untouched, which makes the operation
// idempotent.
Dataset row_l2_normalize(const Dataset& ds);

}  // namespace dperm
