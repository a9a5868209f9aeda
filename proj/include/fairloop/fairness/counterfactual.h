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

#ifndef FAIRLOOP_FAIRNESS_COUNTERFACTUAL_H_
#define FAIRLOOP_FAIRNESS_COUNTERFACTUAL_H_

#include <string>
#include <vector>

#include "fairloop/data/binning.h"
#include "fairloop/data/preprocess.h"
#include "fairloop/gbdt/model.h"

namespace fairloop::fairness {

// Substitution plan for one attribute over one dataset: the observed values
// (or, for a binned numeric, the median of each observed bin) and which of
// them each row currently holds.
class CounterfactualPlan {
 public:
  // rule is required for numeric attributes and ignored otherwise. Throws
  // kInvalidArgument if fewer than two values are observed.
  CounterfactualPlan(const data::Dataset& dataset, const std::string& attribute,
                     const data::BinningRule* rule);

  const std::string& attribute() const { return attribute_; }
  std::size_t feature() const { return feature_; }
  const std::vector<data::Cell>& substitutes() const { return substitutes_; }
  std::size_t ValueOf(std::size_t row) const { return value_of_row_[row]; }

 private:
  std::string attribute_;
  std::size_t feature_ = 0;
  std::vector<data::Cell> substitutes_;
  std::vector<std::size_t> value_of_row_;
};

// Fraction of rows whose predicted label is unchanged under every
// substitution of the attribute by one of its other values. encoded must be
// encoder.Transform(dataset) for the dataset the plan was built on.
double CounterfactualInvariance(const gbdt::Model& model,
                                const data::Encoder& encoder,
                                const data::EncodedMatrix& encoded,
                                const CounterfactualPlan& plan);

double CounterfactualInvariance(const gbdt::Model& model,
                                const data::Encoder& encoder,
                                const data::Dataset& dataset,
                                const std::string& attribute,
                                const data::BinningRule* rule);

}  // namespace fairloop::fairness

#endif  // FAIRLOOP_FAIRNESS_COUNTERFACTUAL_H_
