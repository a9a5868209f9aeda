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

#ifndef FAIRLOOP_DATA_SPLIT_H_
#define FAIRLOOP_DATA_SPLIT_H_

#include <cstdint>
#include <variant>

#include "fairloop/data/dataset.h"

namespace fairloop::data {

// Class-balanced training sample of n_train rows (majority rows discarded)
// plus a uniformly drawn holdout of n_holdout rows from what remains.
struct UndersampleTrain {
  std::size_t n_train = 0;
  std::size_t n_holdout = 0;
};

// Training sample of n rows preserving the target proportion; the remaining
// rows form the test set.
struct Stratified {
  std::size_t n = 0;
};

using SplitMode = std::variant<UndersampleTrain, Stratified>;

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Both outputs keep the source row order. Requires complete targets.
TrainTestSplit Split(const Dataset& dataset, const SplitMode& mode,
                     std::uint64_t seed);

}  // namespace fairloop::data

#endif  // FAIRLOOP_DATA_SPLIT_H_
