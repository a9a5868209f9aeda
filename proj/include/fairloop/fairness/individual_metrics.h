// Copyright 2026 The Fairloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRLOOP_FAIRNESS_INDIVIDUAL_METRICS_H_
#define FAIRLOOP_FAIRNESS_INDIVIDUAL_METRICS_H_

#include <span>
#include <vector>

#include "fairloop/data/preprocess.h"
#include "fairloop/gbdt/model.h"

namespace fairloop::fairness {

using gbdt::Outcome;

// k nearest neighbours of every row by Euclidean distance over all encoded
// columns, self excluded, ties broken by lower row index. The neighbour
// graph depends only on the features, so it is built once per evaluation set
// and reused across models.
class NeighborIndex {
 public:
  static NeighborIndex Build(const data::EncodedMatrix& matrix, int k,
                             int num_threads = 1);

  int k() const { return k_; }
  std::size_t size() const { return neighbors_.size() / static_cast<std::size_t>(k_); }
  std::span<const std::size_t> neighbors(std::size_t row) const {
    return {neighbors_.data() + row * static_cast<std::size_t>(k_),
            static_cast<std::size_t>(k_)};
  }

 private:
  int k_ = 0;
  std::vector<std::size_t> neighbors_;
};

// 1 - (1/n) sum_i |yhat_i - mean_{j in kNN(i)} yhat_j|.
double Consistency(std::span<const Outcome> predicted, const NeighborIndex& index);
double Consistency(std::span<const Outcome> predicted,
                   const data::EncodedMatrix& matrix, int k);

// Generalized entropy (alpha = 1) of benefits b_i = yhat_i - y_i + 1 with
// Accept coded as 1. Throws kUndefinedMetric when the mean benefit is zero.
double TheilIndex(std::span<const Outcome> predicted, std::span<const int> truth);

// Fraction of rows whose predicted outcome matches the target; optional
// per-row weights.
double Accuracy(std::span<const Outcome> predicted, std::span<const int> truth,
                std::span<const double> weights = {});

}  // namespace fairloop::fairness

#endif  // FAIRLOOP_FAIRNESS_INDIVIDUAL_METRICS_H_
