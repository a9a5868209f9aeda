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

#include "fairloop/fairness/individual_metrics.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "fairloop/common/error.h"

namespace fairloop::fairness {
namespace {

double Value(Outcome o) { return o == Outcome::kAccept ? 1.0 : 0.0; }

}  // namespace

NeighborIndex NeighborIndex::Build(const data::EncodedMatrix& matrix, int k,
                                   int num_threads) {
  const std::size_t n = matrix.num_rows();
  if (k <= 0) Fail(ErrorCode::kInvalidArgument, "k must be positive");
  if (static_cast<std::size_t>(k) >= n) {
    Fail(ErrorCode::kInvalidArgument,
         "k must be smaller than the number of rows (k=" + std::to_string(k) +
             ", n=" + std::to_string(n) + ")");
  }
  const std::size_t kk = static_cast<std::size_t>(k);
  const std::size_t d = matrix.num_columns();

  // Row-major copy for cache-friendly distance loops.
  std::vector<double> rows(n * d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = matrix.column(c);
    for (std::size_t r = 0; r < n; ++r) rows[r * d + c] = col[r];
  }

  NeighborIndex index;
  index.k_ = k;
  index.neighbors_.assign(n * kk, 0);

  auto work = [&](std::size_t begin, std::size_t end) {
    // Max-heap on (distance, index) keeps the k best; lexicographic order
    // gives the lower index priority among equal distances.
    std::vector<std::pair<double, std::size_t>> heap;
    heap.reserve(kk + 1);
    for (std::size_t i = begin; i < end; ++i) {
      heap.clear();
      const double* xi = rows.data() + i * d;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double* xj = rows.data() + j * d;
        double dist = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = xi[c] - xj[c];
          dist += diff * diff;
        }
        std::pair<double, std::size_t> entry{dist, j};
        if (heap.size() < kk) {
          heap.push_back(entry);
          std::push_heap(heap.begin(), heap.end());
        } else if (entry < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = entry;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      std::sort_heap(heap.begin(), heap.end());
      for (std::size_t m = 0; m < kk; ++m) {
        index.neighbors_[i * kk + m] = heap[m].second;
      }
    }
  };

  const std::size_t threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(num_threads, 1)), 1, n);
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return index;
}

double Consistency(std::span<const Outcome> predicted, const NeighborIndex& index) {
  const std::size_t n = predicted.size();
  if (n != index.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "predictions not aligned with the neighbour index");
  }
  const double k = static_cast<double>(index.k());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j : index.neighbors(i)) sum += Value(predicted[j]);
    total += std::abs(Value(predicted[i]) - sum / k);
  }
  return 1.0 - total / static_cast<double>(n);
}

double Consistency(std::span<const Outcome> predicted,
                   const data::EncodedMatrix& matrix, int k) {
  if (predicted.size() != matrix.num_rows()) {
    Fail(ErrorCode::kInvalidArgument, "predictions not aligned with matrix");
  }
  return Consistency(predicted, NeighborIndex::Build(matrix, k));
}

double TheilIndex(std::span<const Outcome> predicted, std::span<const int> truth) {
  const std::size_t n = predicted.size();
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "Theil index of an empty set");
  if (truth.size() != n) {
    Fail(ErrorCode::kInvalidArgument, "predictions and truth must be aligned");
  }
  std::vector<double> benefit(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = truth[i] == data::kTargetAccept ? 1.0 : 0.0;
    benefit[i] = Value(predicted[i]) - y + 1.0;
    sum += benefit[i];
  }
  const double mu = sum / static_cast<double>(n);
  if (mu == 0.0) {
    Fail(ErrorCode::kUndefinedMetric,
         "Theil index undefined: every prediction is a false negative");
  }
  double total = 0.0;
  for (double b : benefit) {
    if (b == 0.0) continue;
    const double r = b / mu;
    total += r * std::log(r);
  }
  return total / static_cast<double>(n);
}

double Accuracy(std::span<const Outcome> predicted, std::span<const int> truth,
                std::span<const double> weights) {
  const std::size_t n = predicted.size();
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "accuracy of an empty set");
  if (truth.size() != n || (!weights.empty() && weights.size() != n)) {
    Fail(ErrorCode::kInvalidArgument,
         "predictions, truth and weights must be aligned");
  }
  double correct = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0 || !std::isfinite(w)) {
      Fail(ErrorCode::kInvalidArgument, "accuracy weights must be non-negative");
    }
    total += w;
    if (gbdt::TargetFromOutcome(predicted[i]) == truth[i]) correct += w;
  }
  if (total == 0.0) Fail(ErrorCode::kInvalidArgument, "accuracy weights are all zero");
  return correct / total;
}

}  // namespace fairloop::fairness
