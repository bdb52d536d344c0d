#include "gbcert/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gbcert/rng.hpp"

namespace gbcert {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    std::size_t start = cell.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? "" : cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

LoadedCsv load_csv(const std::string& path, FxpConfig cfg,
                   const std::string& label_col) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty CSV", 0, 0);
  std::vector<std::string> header = split_line(line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_col) label_idx = i;
  if (label_idx == header.size())
    throw std::runtime_error("label column '" + label_col + "' not found in " + path);

  LoadedCsv out;
  out.ds.cfg = cfg;
  out.ds.cols = header.size() - 1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != label_idx) out.feature_names.push_back(header[i]);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw CsvError("wrong cell count", row, cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) {
        if (cells[c] == "0")
          out.ds.y.push_back(0);
        else if (cells[c] == "1")
          out.ds.y.push_back(1);
        else
          throw CsvError("label must be 0 or 1", row, c + 1);
      } else {
        try {
          Fxp q = quantize_decimal(cells[c], cfg);
          out.ds.x.push_back(q.raw);
          out.x_real.push_back(std::stod(cells[c]));
        } catch (const std::exception&) {
          throw CsvError("non-numeric cell '" + cells[c] + "'", row, c + 1);
        }
      }
    }
  }
  out.ds.rows = row;
  if (row == 0) throw CsvError("CSV has no data rows", 0, 0);
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<double>& x_real,
               const std::vector<std::uint8_t>& y, std::size_t rows,
               std::size_t cols) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write CSV file: " + path);
  for (std::size_t f = 0; f < cols; ++f) outf << names[f] << ",";
  outf << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t f = 0; f < cols; ++f) {
      // fixed notation keeps the file within quantize_decimal's plain grammar
      std::snprintf(buf, sizeof buf, "%.9f", x_real[i * cols + f]);
      outf << buf << ",";
    }
    outf << int(y[i]) << "\n";
  }
}

LoadedCsv make_synthetic(std::size_t rows, std::size_t cols, std::uint64_t seed,
                         double separation, FxpConfig cfg) {
  Rng rng(seed);
  LoadedCsv out;
  out.ds.cfg = cfg;
  out.ds.rows = rows;
  out.ds.cols = cols;
  out.ds.x.reserve(rows * cols);
  out.x_real.reserve(rows * cols);
  for (std::size_t f = 0; f < cols; ++f)
    out.feature_names.push_back("f" + std::to_string(f));

  // Gaussian via sum of 12 uniforms: avoids libm so the draw is identical on
  // every platform, and 12.3 digits of resolution is plenty for test data.
  auto gauss = [&rng]() {
    double s = 0;
    for (int k = 0; k < 12; ++k)
      s += static_cast<double>(rng.next() >> 11) * (1.0 / 9007199254740992.0);
    return s - 6.0;
  };

  double offset = separation / 2.0;
  for (std::size_t i = 0; i < rows; ++i) {
    std::uint8_t label = static_cast<std::uint8_t>(rng.next() & 1);
    out.ds.y.push_back(label);
    double mean = label ? offset : -offset;
    for (std::size_t f = 0; f < cols; ++f) {
      // Round to 6 decimals so CSV round-trips reproduce the exact dataset.
      double v = mean + gauss();
      v = std::floor(v * 1e6 + (v < 0 ? -0.5 : 0.5)) / 1e6;
      out.x_real.push_back(v);
      out.ds.x.push_back(quantize(v, cfg).raw);
    }
  }
  return out;
}

SplitIndices split_dataset(std::size_t rows, int train_pct, std::uint64_t seed) {
  std::vector<std::uint32_t> idx(rows);
  for (std::size_t i = 0; i < rows; ++i) idx[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed);
  for (std::size_t i = rows; i > 1; --i) {
    std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  SplitIndices out;
  std::size_t cut = rows * static_cast<std::size_t>(train_pct) / 100;
  out.train.assign(idx.begin(), idx.begin() + cut);
  out.test.assign(idx.begin() + cut, idx.end());
  return out;
}

Dataset subset(const Dataset& ds, const std::vector<std::uint32_t>& idx) {
  Dataset out;
  out.cfg = ds.cfg;
  out.rows = idx.size();
  out.cols = ds.cols;
  out.x.reserve(idx.size() * ds.cols);
  out.y.reserve(idx.size());
  for (std::uint32_t i : idx) {
    for (std::size_t f = 0; f < ds.cols; ++f) out.x.push_back(ds.at(i, f));
    out.y.push_back(ds.y[i]);
  }
  return out;
}

}  // namespace gbcert
