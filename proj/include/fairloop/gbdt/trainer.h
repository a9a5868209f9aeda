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

#ifndef FAIRLOOP_GBDT_TRAINER_H_
#define FAIRLOOP_GBDT_TRAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairloop/common/error.h"
#include "fairloop/data/preprocess.h"
#include "fairloop/gbdt/model.h"

namespace fairloop::gbdt {

struct GradientPair {
  double grad = 0.0;
  double hess = 0.0;
};

// First and second derivative of w * logloss(y, sigmoid(margin)) with respect
// to the margin: g = w (p - y), h = w p (1 - p).
GradientPair LogisticGradient(double margin, int target, double weight);

// w * [-y log p - (1 - y) log(1 - p)], computed stably from the margin.
double WeightedLogLoss(double margin, int target, double weight);

double Sigmoid(double margin);

// Structure score improvement of splitting (G, H) into left and right parts:
// 0.5 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma.
double SplitGain(double grad_left, double hess_left, double grad_right,
                 double hess_right, double lambda, double gamma);

// Feature groups drawn for one tree: all groups when ceil(colsample * F) >= F,
// otherwise that many groups without replacement, each draw proportional to
// the remaining weights. Zero-weight groups are never drawn in that case.
std::vector<std::size_t> SampleGroups(std::span<const double> group_weights,
                                      double colsample, std::uint64_t seed,
                                      std::size_t tree_index);

// Second-order boosting of logistic loss with exact greedy splits.
// Rows with zero instance weight are dropped before training, so they affect
// neither the trees nor the fingerprint.
Model Train(const data::EncodedMatrix& matrix, const GbdtParams& params,
            const InstanceWeights& instance_weights,
            const FeatureWeights& feature_weights,
            Warnings* warnings = nullptr);

}  // namespace fairloop::gbdt

#endif  // FAIRLOOP_GBDT_TRAINER_H_
