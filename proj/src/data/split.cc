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

#include "fairloop/data/split.h"

#include <algorithm>
#include <cmath>

#include "fairloop/common/error.h"
#include "fairloop/common/random.h"

namespace fairloop::data {

namespace {

std::vector<std::size_t> Draw(std::vector<std::size_t> pool, std::size_t n,
                              Rng& rng) {
  rng.Shuffle(pool);
  pool.resize(n);
  return pool;
}

TrainTestSplit Assemble(const Dataset& dataset, std::vector<std::size_t> train,
                        std::vector<std::size_t> test) {
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {dataset.Select(train), dataset.Select(test)};
}

}  // namespace

TrainTestSplit Split(const Dataset& dataset, const SplitMode& mode,
                     std::uint64_t seed) {
  const std::vector<int> target = dataset.RequireTargets();
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < target.size(); ++i) {
    (target[i] == 1 ? positives : negatives).push_back(i);
  }
  Rng rng(seed);

  if (const auto* under = std::get_if<UndersampleTrain>(&mode)) {
    const std::size_t n_pos = under->n_train / 2;
    const std::size_t n_neg = under->n_train - n_pos;
    if (positives.size() < n_pos || negatives.size() < n_neg) {
      Fail(ErrorCode::kInvalidArgument,
           "undersample: need " + std::to_string(n_pos) + " positive and " +
               std::to_string(n_neg) + " negative rows, have " +
               std::to_string(positives.size()) + " and " +
               std::to_string(negatives.size()));
    }
    std::vector<std::size_t> train = Draw(positives, n_pos, rng);
    std::vector<std::size_t> neg = Draw(negatives, n_neg, rng);
    train.insert(train.end(), neg.begin(), neg.end());

    std::vector<bool> used(target.size(), false);
    for (std::size_t i : train) used[i] = true;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (!used[i]) rest.push_back(i);
    }
    if (rest.size() < under->n_holdout) {
      Fail(ErrorCode::kInvalidArgument,
           "undersample: holdout of " + std::to_string(under->n_holdout) +
               " requested but only " + std::to_string(rest.size()) +
               " rows remain");
    }
    return Assemble(dataset, std::move(train),
                    Draw(std::move(rest), under->n_holdout, rng));
  }

  const auto& strat = std::get<Stratified>(mode);
  if (strat.n > target.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "stratified: requested " + std::to_string(strat.n) + " rows, have " +
             std::to_string(target.size()));
  }
  const double share = static_cast<double>(positives.size()) /
                       static_cast<double>(target.size());
  std::size_t n_pos = static_cast<std::size_t>(
      std::floor(share * static_cast<double>(strat.n) + 0.5));
  n_pos = std::min(n_pos, positives.size());
  std::size_t n_neg = strat.n - n_pos;
  if (n_neg > negatives.size()) {
    n_neg = negatives.size();
    n_pos = strat.n - n_neg;
  }
  rng.Shuffle(positives);
  rng.Shuffle(negatives);
  std::vector<std::size_t> train(positives.begin(), positives.begin() + n_pos);
  train.insert(train.end(), negatives.begin(), negatives.begin() + n_neg);
  std::vector<std::size_t> test(positives.begin() + n_pos, positives.end());
  test.insert(test.end(), negatives.begin() + n_neg, negatives.end());
  return Assemble(dataset, std::move(train), std::move(test));
}

}  // namespace fairloop::data
