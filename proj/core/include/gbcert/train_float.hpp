#pragma once

#include <cstdint>
#include <vector>

#include "gbcert/train.hpp"

namespace gbcert {

/// Double-precision mirror of the fixed-point trainer: identical control flow
/// and the same piecewise sigmoid / truncated-series logit, evaluated in
/// reals, so the two paths differ only by rounding. Used for accuracy-parity
/// checks against the fixed-point model.

struct FloatTree {
  int depth = 0;
  std::vector<std::int32_t> split_feature;
  std::vector<double> threshold;
  std::vector<double> leaf_weight;
};

struct FloatModel {
  Hyperparams hp;      // eta/lambda/gamma interpreted via real_of below
  double base_score = 0.0;
  double eta = 0.0, lambda = 0.0, gamma = 0.0, p_min = 0.0;
  std::vector<FloatTree> trees;
};

double sigmoid_wide_real(double z);
double logit_from_prob_real(double p);

FloatModel train_float_reference(const std::vector<double>& x,
                                 const std::vector<std::uint8_t>& y,
                                 std::size_t rows, std::size_t cols,
                                 const Hyperparams& hp, FxpConfig cfg);

double predict_margin_float(const FloatModel& model, const double* row);

double accuracy_float(const FloatModel& model, const std::vector<double>& x,
                      const std::vector<std::uint8_t>& y, std::size_t rows,
                      std::size_t cols);

}  // namespace gbcert
