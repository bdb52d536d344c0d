#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbcert/fxp.hpp"

namespace gbcert {

/// A binary-classification dataset with quantized features.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> x;  // row-major raw Fxp features, rows x cols
  std::vector<std::uint8_t> y;  // labels in {0,1}
  FxpConfig cfg;

  std::int64_t at(std::size_t i, std::size_t f) const { return x[i * cols + f]; }
  bool shape_ok() const { return x.size() == rows * cols && y.size() == rows; }
};

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t row, std::size_t col)
      : std::runtime_error(what + " at row " + std::to_string(row) + ", column " +
                           std::to_string(col)),
        row(row),
        col(col) {}
  std::size_t row, col;
};

struct LoadedCsv {
  Dataset ds;
  std::vector<double> x_real;             // same shape as ds.x, unquantized
  std::vector<std::string> feature_names;
};

/// Parses a headered CSV, quantizing each feature cell with quantize_decimal.
/// The label column (default "label") must hold 0/1.
LoadedCsv load_csv(const std::string& path, FxpConfig cfg,
                   const std::string& label_col = "label");

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<double>& x_real,
               const std::vector<std::uint8_t>& y, std::size_t rows,
               std::size_t cols);

/// Two seeded Gaussian blobs, one per class, pushed apart by `separation`
/// standard deviations. Returns real features for the float-reference path.
LoadedCsv make_synthetic(std::size_t rows, std::size_t cols, std::uint64_t seed,
                         double separation, FxpConfig cfg);

/// Deterministic shuffled train/test split; first train_pct% go to train.
struct SplitIndices {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> test;
};
SplitIndices split_dataset(std::size_t rows, int train_pct, std::uint64_t seed);

Dataset subset(const Dataset& ds, const std::vector<std::uint32_t>& idx);

}  // namespace gbcert
