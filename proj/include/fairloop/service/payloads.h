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

#ifndef FAIRLOOP_SERVICE_PAYLOADS_H_
#define FAIRLOOP_SERVICE_PAYLOADS_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairloop/data/schema.h"
#include "fairloop/fairness/report.h"
#include "fairloop/integration/session.h"
#include "json.hpp"

namespace fairloop::service {

inline constexpr int kApiSchemaVersion = 1;

// Display form of a categorical value; the raw value when no label is set.
std::string DisplayValue(const data::SchemaConfig& config, const std::string& feature,
                         const std::string& value);

nlohmann::json SessionDescriptor(const std::string& session_id,
                                 const integration::FeedbackSession& session,
                                 const data::SchemaConfig& config);

enum class SortKey { kId, kConfidence, kPrediction, kProbability, kStatus };

struct ApplicationQuery {
  SortKey sort = SortKey::kId;
  bool descending = false;
  // attribute -> accepted values (raw or display form); all must match.
  std::vector<std::pair<std::string, std::string>> filters;
};

// Parses sort/order/filter query parameters; throws kInvalidArgument for an
// unknown sort key, order or filtered attribute.
ApplicationQuery ParseApplicationQuery(
    const std::multimap<std::string, std::string>& params, const data::Schema& schema);

nlohmann::json ApplicationViews(const integration::FeedbackSession& session,
                                const data::SchemaConfig& config,
                                const ApplicationQuery& query);

// Attributes named in a comma separated list, or the protected ones when the
// list is absent. Throws kInvalidArgument for unknown names.
std::vector<std::string> ParseAttributeList(const std::optional<std::string>& list,
                                            const data::Schema& schema);

// Overview plus per-attribute DPR, AOD and value distribution blocks, and the
// full report.
nlohmann::json MetricsPayload(const integration::FeedbackSession& session,
                              const data::SchemaConfig& config,
                              const std::vector<std::string>& attributes);

nlohmann::json ErrorBody(const Error& error);
int HttpStatus(ErrorCode code);

}  // namespace fairloop::service

#endif  // FAIRLOOP_SERVICE_PAYLOADS_H_
