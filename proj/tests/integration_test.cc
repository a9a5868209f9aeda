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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fairloop/common/error.h"
#include "fairloop/common/random.h"
#include "fairloop/integration/deltas.h"
#include "fairloop/integration/feedback.h"
#include "fairloop/integration/policy.h"
#include "fairloop/integration/retrain.h"
#include "fairloop/integration/session.h"
#include "support/world.h"

namespace fairloop::integration {
namespace {

using fairness::MetricId;
using gbdt::Outcome;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

FeedbackInstance Fb(const std::string& app, FeedbackLabel label, std::int64_t ts = 0,
                    const std::string& pid = "p1", std::optional<RawWeights> w = std::nullopt) {
  return {pid, app, ts, label, std::move(w)};
}

const testing::World& World() {
  static const testing::World world = testing::LoanWorld(400, 1, 10);
  return world;
}

// Pool applications with the given baseline predicted label.
std::vector<std::string> PoolWith(Outcome label) {
  const auto& ctx = *World().context;
  std::vector<std::string> out;
  for (std::size_t r = 0; r < ctx.app_pool.num_rows(); ++r) {
    if (ctx.pool_predictions[r].label == label) out.push_back(ctx.app_pool.id(r));
  }
  return out;
}

TEST(Feedback, JsonFieldsAreExact) {
  const auto f = FeedbackFromJson(nlohmann::json::parse(
      R"({"participant_id":"p","application_id":"a","timestamp_ms":5,"label":"unfair","weights":null})"));
  EXPECT_EQ(f.label, FeedbackLabel::kUnfair);
  EXPECT_FALSE(f.weights.has_value());
  EXPECT_EQ(FeedbackFromJson(ToJson(f)), f);
  EXPECT_THROW(FeedbackFromJson(nlohmann::json::parse(
                   R"({"participant_id":"p","application_id":"a","timestamp_ms":5,"label":"unfair","weights":null,"extra":1})")),
               Error);
  EXPECT_THROW(FeedbackFromJson(nlohmann::json::parse(
                   R"({"participant_id":"p","application_id":"a","timestamp_ms":5,"label":"weights_only","weights":null})")),
               Error);
  EXPECT_THROW(ParseFeedbackLabel("maybe"), Error);
}

TEST(Feedback, WeightValidation) {
  EXPECT_NO_THROW(ValidateRawWeights({{"Age", 0.0}, {"Gender", 2.0}}));
  EXPECT_EQ(CodeOf([] { ValidateRawWeights({{"Age", -1.0}}); }), ErrorCode::kUnprocessable);
  EXPECT_NO_THROW(ValidateRawWeights({{"Age", 0.0}}));
  EXPECT_EQ(CodeOf([] { ValidateRawWeights({}); }), ErrorCode::kUnprocessable);
}

TEST(Feedback, JsonlCollectsLineErrors) {
  const std::string text =
      R"({"participant_id":"p","application_id":"a","timestamp_ms":1,"label":"fair","weights":null})"
      "\n\nnot json\n"
      R"({"participant_id":"p","application_id":"b","timestamp_ms":2,"label":"bogus","weights":null})"
      "\n"
      R"({"participant_id":"p","application_id":"c","timestamp_ms":3,"label":"unfair","weights":{"Age":1}})"
      "\n";
  const auto log = ParseFeedbackJsonl(text);
  ASSERT_EQ(log.instances.size(), 2u);
  EXPECT_EQ(log.lines, (std::vector<std::size_t>{1, 5}));
  ASSERT_EQ(log.errors.size(), 2u);
  EXPECT_EQ(log.errors[0].line, 3u);
  EXPECT_EQ(log.errors[1].line, 4u);
  EXPECT_EQ(ParseFeedbackJsonl(ToJsonl(log.instances)).instances, log.instances);
}

TEST(Feedback, MappedCsv) {
  FeedbackMapping mapping;
  mapping.participant_id = "user";
  mapping.application_id = "app";
  mapping.timestamp = "time_s";
  mapping.timestamp_scale = 1000;
  mapping.label = "judgement";
  mapping.label_values = {{"0", "fair"}, {"1", "unfair"}};
  mapping.weight_columns = {{"Age", "w_age"}};
  const auto log = ParseMappedCsv(
      "user,app,time_s,judgement,w_age\nu1,A1,1.5,1,\nu1,A2,2,0,3\nu2,A3,x,1,\n", mapping);
  ASSERT_EQ(log.instances.size(), 2u);
  EXPECT_EQ(log.instances[0].timestamp_ms, 1500);
  EXPECT_EQ(log.instances[0].label, FeedbackLabel::kUnfair);
  EXPECT_FALSE(log.instances[0].weights.has_value());
  EXPECT_EQ(log.instances[1].weights->at("Age"), 3.0);
  ASSERT_EQ(log.errors.size(), 1u);
  EXPECT_EQ(log.errors[0].line, 4u);
  EXPECT_EQ(FeedbackMappingFromJson(ToJson(mapping)).label_values, mapping.label_values);
}

TEST(Feedback, OrderingHelpers) {
  const std::vector<FeedbackInstance> log = {
      Fb("a", FeedbackLabel::kUnfair, 5), Fb("b", FeedbackLabel::kFair, 3),
      Fb("a", FeedbackLabel::kFair, 5), Fb("a", FeedbackLabel::kUnfair, 1, "p2")};
  const auto sorted = SortByTimestamp(log);
  EXPECT_EQ(sorted[0].participant_id, "p2");
  EXPECT_EQ(sorted[2].label, FeedbackLabel::kUnfair);  // equal timestamps keep log order
  const auto latest = LatestPerApplication(log);
  ASSERT_EQ(latest.size(), 3u);
  EXPECT_EQ(latest[0].application_id, "a");
  EXPECT_EQ(latest[0].label, FeedbackLabel::kFair);
  const auto by = ByParticipant(log);
  EXPECT_EQ(by.at("p1").size(), 3u);
  EXPECT_EQ(by.at("p1")[0].application_id, "b");
}

TEST(ApplyPolicy, UnfairOnRejectAddsAcceptRow) {
  const auto& ctx = *World().context;
  const auto rejected = PoolWith(Outcome::kReject);
  ASSERT_FALSE(rejected.empty());
  const std::vector<FeedbackInstance> fb = {Fb(rejected[0], FeedbackLabel::kUnfair)};
  const auto out = ApplyPolicy(ctx, fb, IntegrationPolicy{});
  ASSERT_EQ(out.pool_rows.size(), 1u);
  EXPECT_EQ(out.targets[0], 0);
  EXPECT_EQ(ctx.app_pool.id(out.pool_rows[0]), rejected[0]);
  const auto ds = Materialize(ctx, out);
  EXPECT_EQ(ds.num_rows(), ctx.base_train.num_rows() + 1);
  EXPECT_EQ(ds.id(ds.num_rows() - 1), rejected[0] + "#fb0");
  EXPECT_EQ(ds.target(ds.num_rows() - 1), 0);
}

TEST(ApplyPolicy, FairRowsOnlyUnderLabels) {
  const auto& ctx = *World().context;
  const auto accepted = PoolWith(Outcome::kAccept);
  ASSERT_FALSE(accepted.empty());
  const std::vector<FeedbackInstance> fb = {Fb(accepted[0], FeedbackLabel::kFair)};
  const auto unfair_only = ApplyPolicy(ctx, fb, IntegrationPolicy{PolicyKind::kLabelsUnfair});
  EXPECT_TRUE(unfair_only.pool_rows.empty());
  EXPECT_FALSE(unfair_only.effective());
  const auto labels = ApplyPolicy(ctx, fb, IntegrationPolicy{PolicyKind::kLabels});
  ASSERT_EQ(labels.pool_rows.size(), 1u);
  EXPECT_EQ(labels.targets[0], 0);  // predicted Accept kept
}

TEST(ApplyPolicy, WeightsOnlyChangesWeightsNotRows) {
  const auto& ctx = *World().context;
  const auto app = ctx.app_pool.id(0);
  const std::vector<FeedbackInstance> fb = {
      Fb(app, FeedbackLabel::kWeightsOnly, 1, "p1", RawWeights{{"Gender", 0.0}})};
  const auto out = ApplyPolicy(ctx, fb, IntegrationPolicy{PolicyKind::kLabelsUnfairPlusWeights});
  EXPECT_TRUE(out.pool_rows.empty());
  EXPECT_TRUE(out.weights_changed);
  EXPECT_EQ(out.feature_weights.at("Gender"), 0.0);
  Warnings warnings;
  const auto ignored = ApplyPolicy(ctx, fb, IntegrationPolicy{PolicyKind::kLabels}, &warnings);
  EXPECT_FALSE(ignored.effective());
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_TRUE(ignored.feature_weights == ctx.baseline_weights);
}

TEST(ApplyPolicy, UnknownApplicationAndGroundTruthFlips) {
  const auto& ctx = *World().context;
  const std::vector<FeedbackInstance> bad = {Fb("nope", FeedbackLabel::kUnfair)};
  EXPECT_EQ(CodeOf([&] { ApplyPolicy(ctx, bad, IntegrationPolicy{}); }), ErrorCode::kNotFound);
  IntegrationPolicy gt;
  gt.flip_source = FlipSource::kGroundTruth;
  const std::vector<FeedbackInstance> fb = {Fb(ctx.app_pool.id(3), FeedbackLabel::kUnfair)};
  const auto out = ApplyPolicy(ctx, fb, gt);
  EXPECT_EQ(out.targets[0], 1 - *ctx.app_pool.target(3));
}

TEST(MergeWeights, LatestOverwritesFeatureByFeature) {
  const auto& ctx = *World().context;
  const std::vector<FeedbackInstance> fb = {
      Fb("a", FeedbackLabel::kWeightsOnly, 1, "p1", RawWeights{{"Gender", 0.0}, {"Age", 5.0}}),
      Fb("a", FeedbackLabel::kWeightsOnly, 2, "p1", RawWeights{{"Age", 0.0}})};
  const auto merged = MergeWeights(ctx.baseline_weights, fb);
  EXPECT_EQ(merged.at("Gender"), 0.0);
  EXPECT_EQ(merged.at("Age"), 0.0);
  double sum = 0;
  for (const auto& [k, v] : merged.values()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  const std::vector<FeedbackInstance> unknown = {
      Fb("a", FeedbackLabel::kWeightsOnly, 1, "p1", RawWeights{{"Shoe Size", 1.0}})};
  EXPECT_THROW(MergeWeights(ctx.baseline_weights, unknown), Error);
}

TEST(PercentChange, Examples) {
  const auto up = ComputePercentChange(0.5, 0.6, Direction::kHigherBetter);
  EXPECT_NEAR(*up.percent, 20.0, 1e-12);
  EXPECT_TRUE(up.improved);
  EXPECT_EQ(up.band, HighlightBand::kDark);
  const auto worse = ComputePercentChange(0.30, 0.32, Direction::kLowerBetter);
  EXPECT_NEAR(*worse.percent, 6.6666666666666, 1e-9);
  EXPECT_TRUE(worse.worsened);
  EXPECT_FALSE(worse.improved);
  EXPECT_NEAR(*worse.improvement_percent, -6.6666666666666, 1e-9);
  const auto zero = ComputePercentChange(0.0, 0.1, Direction::kHigherBetter);
  EXPECT_TRUE(zero.baseline_zero);
  EXPECT_FALSE(zero.percent.has_value());
  EXPECT_DOUBLE_EQ(zero.absolute_change, 0.1);
  // Toward-ideal metrics improve when the distance to the ideal shrinks.
  const auto toward = ComputePercentChange(0.7, 0.9, Direction::kTowardIdeal, 1.0);
  EXPECT_TRUE(toward.improved);
  const auto light = ComputePercentChange(1.0, 1.03, Direction::kHigherBetter);
  EXPECT_EQ(light.band, HighlightBand::kLight);
  EXPECT_EQ(ComputePercentChange(1.0, 1.0, Direction::kHigherBetter).band, HighlightBand::kNone);
}

TEST(Cma, Examples) {
  const std::vector<std::optional<double>> one = {0.4};
  EXPECT_EQ(CumulativeMovingAverage(one)[0], 0.4);
  const std::vector<std::optional<double>> raw = {0.5, 0.7, 0.6};
  const auto cma = CumulativeMovingAverage(raw);
  EXPECT_NEAR(*cma[0], 0.5, 1e-15);
  EXPECT_NEAR(*cma[1], 0.6, 1e-15);
  EXPECT_NEAR(*cma[2], 0.6, 1e-15);
  const std::vector<std::optional<double>> gaps = {std::nullopt, 1.0, std::nullopt, 3.0};
  const auto g = CumulativeMovingAverage(gaps);
  EXPECT_FALSE(g[0].has_value());
  EXPECT_EQ(g[2], 1.0);
  EXPECT_EQ(g[3], 2.0);
}

TEST(Cma, IncrementalMatchesScratch) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::optional<double>> raw;
    const std::size_t n = 1 + rng.Below(200);
    for (std::size_t i = 0; i < n; ++i) raw.push_back(rng.Uniform() * 1e3 - 500);
    const auto cma = CumulativeMovingAverage(raw);
    for (std::size_t t = 0; t < n; ++t) {
      long double sum = 0;
      for (std::size_t i = 0; i <= t; ++i) sum += *raw[i];
      const double scratch = static_cast<double>(sum / (t + 1));
      EXPECT_LE(std::fabs(*cma[t] - scratch), 1e-12 * std::max(1.0, std::fabs(scratch)));
    }
  }
}

TEST(RetrainGlobal, ZeroFeedbackIsIdentity) {
  const auto& w = World();
  const auto out = RetrainGlobal(*w.context, {}, IntegrationPolicy{}, *w.evaluator,
                                 *w.baseline_report);
  EXPECT_FALSE(out.effective_feedback);
  EXPECT_EQ(out.model->fingerprint(), w.context->baseline_model->fingerprint());
  for (const auto& d : out.deltas) {
    if (!d.change) continue;
    EXPECT_EQ(d.change->absolute_change, 0.0);
    if (d.change->percent) {
      EXPECT_EQ(*d.change->percent, 0.0);
    }
  }
}

TEST(RetrainGlobal, DuplicateJudgementsUseLatest) {
  const auto& w = World();
  const auto rejected = PoolWith(Outcome::kReject);
  const std::vector<FeedbackInstance> dup = {Fb(rejected[0], FeedbackLabel::kUnfair, 1),
                                             Fb(rejected[0], FeedbackLabel::kFair, 2)};
  const auto out = RetrainGlobal(*w.context, dup, IntegrationPolicy{}, *w.evaluator,
                                 *w.baseline_report);
  EXPECT_EQ(out.added_rows, 0u);
  const std::vector<FeedbackInstance> single = {Fb(rejected[0], FeedbackLabel::kUnfair, 1)};
  const std::vector<FeedbackInstance> dup2 = {Fb(rejected[0], FeedbackLabel::kFair, 1),
                                              Fb(rejected[0], FeedbackLabel::kUnfair, 2)};
  EXPECT_EQ(RetrainGlobal(*w.context, dup2, IntegrationPolicy{}, *w.evaluator, *w.baseline_report)
                .model->fingerprint(),
            RetrainGlobal(*w.context, single, IntegrationPolicy{}, *w.evaluator,
                          *w.baseline_report)
                .model->fingerprint());
}

TEST(RetrainGlobal, OrderIndependentUnderLabelsUnfair) {
  const auto& w = World();
  const auto rejected = PoolWith(Outcome::kReject);
  std::vector<FeedbackInstance> fb;
  for (std::size_t i = 0; i < std::min<std::size_t>(8, rejected.size()); ++i) {
    fb.push_back(Fb(rejected[i], FeedbackLabel::kUnfair, static_cast<std::int64_t>(i),
                    i % 2 ? "p1" : "p2"));
  }
  const auto a = RetrainGlobal(*w.context, fb, IntegrationPolicy{}, *w.evaluator,
                               *w.baseline_report);
  std::reverse(fb.begin(), fb.end());
  for (auto& f : fb) f.timestamp_ms = 100 - f.timestamp_ms;
  const auto b = RetrainGlobal(*w.context, fb, IntegrationPolicy{}, *w.evaluator,
                               *w.baseline_report);
  EXPECT_EQ(a.model->fingerprint(), b.model->fingerprint());
}

TEST(RetrainGlobal, AlphaZeroReproducesBaseline) {
  const auto& w = World();
  const auto rejected = PoolWith(Outcome::kReject);
  const auto accepted = PoolWith(Outcome::kAccept);
  const std::vector<FeedbackInstance> fb = {
      Fb(rejected[0], FeedbackLabel::kUnfair, 1), Fb(accepted[0], FeedbackLabel::kFair, 2),
      Fb(rejected[1], FeedbackLabel::kWeightsOnly, 3, "p1", RawWeights{{"Gender", 0.0}}),
      Fb(accepted[1], FeedbackLabel::kUnfair, 4, "p1", RawWeights{{"Age", 9.0}})};
  for (auto kind : {PolicyKind::kLabels, PolicyKind::kLabelsUnfair, PolicyKind::kLabelsPlusWeights,
                    PolicyKind::kLabelsUnfairPlusWeights}) {
    IntegrationPolicy policy{kind, 0.0};
    const auto out = RetrainGlobal(*w.context, fb, policy, *w.evaluator, *w.baseline_report);
    EXPECT_EQ(out.model->fingerprint(), w.context->baseline_model->fingerprint())
        << PolicyKindName(kind);
  }
}

TEST(RetrainGlobal, FlippingOneGroupsRejectsRaisesItsDpr) {
  // 200-row synthetic world; the group with the lower selection rate in the
  // pool has every predicted Reject marked unfair.
  const auto w = testing::LoanWorld(500, 4, 12);
  const auto& ctx = *w.context;
  const std::size_t gender = ctx.app_pool.schema().RequireIndex("Gender");
  std::map<std::string, std::pair<double, double>> rate;  // accepts, total
  for (std::size_t r = 0; r < ctx.app_pool.num_rows(); ++r) {
    auto& [acc, n] = rate[std::get<std::string>(ctx.app_pool.cell(r, gender))];
    acc += ctx.pool_predictions[r].label == Outcome::kAccept;
    n += 1;
  }
  const std::string low = rate["F"].first / rate["F"].second < rate["M"].first / rate["M"].second
                              ? "F"
                              : "M";
  std::vector<FeedbackInstance> fb;
  for (std::size_t r = 0; r < ctx.app_pool.num_rows(); ++r) {
    if (std::get<std::string>(ctx.app_pool.cell(r, gender)) == low &&
        ctx.pool_predictions[r].label == Outcome::kReject) {
      fb.push_back(Fb(ctx.app_pool.id(r), FeedbackLabel::kUnfair, static_cast<std::int64_t>(r)));
    }
  }
  ASSERT_GE(fb.size(), 5u);
  const auto out = RetrainGlobal(ctx, fb, IntegrationPolicy{}, *w.evaluator, *w.baseline_report);
  const auto before = w.baseline_report->Get(MetricId::kDpr, "Gender");
  const auto after = out.report.Get(MetricId::kDpr, "Gender");
  ASSERT_TRUE(before.defined() && after.defined());
  EXPECT_GT(*after.value, *before.value) << "flipped " << fb.size() << " rows of " << low;
}

TEST(RetrainPersonalized, SeriesShape) {
  const auto& w = World();
  const auto rejected = PoolWith(Outcome::kReject);
  ASSERT_GE(rejected.size(), 6u);
  std::vector<FeedbackInstance> fb;
  for (int i = 0; i < 6; ++i) fb.push_back(Fb(rejected[i], FeedbackLabel::kUnfair, 10 - i));
  const auto run = RetrainPersonalized(*w.context, fb, IntegrationPolicy{}, *w.evaluator,
                                       *w.baseline_report);
  EXPECT_EQ(run.steps.size(), 6u);
  EXPECT_EQ(run.series.steps(), 6u);
  for (const auto& track : run.series.tracks()) {
    EXPECT_EQ(track.points.size(), 6u);
    std::vector<std::optional<double>> raw;
    for (const auto& p : track.points) raw.push_back(p.raw);
    const auto cma = CumulativeMovingAverage(raw);
    for (std::size_t t = 0; t < 6; ++t) {
      ASSERT_EQ(track.points[t].cma.has_value(), cma[t].has_value());
      if (cma[t]) {
        EXPECT_NEAR(*track.points[t].cma, *cma[t], 1e-12);
      }
    }
  }
  // Timestamp order: the first step uses the latest-logged instance.
  EXPECT_EQ(run.steps[0].added_rows, 1u);
  EXPECT_EQ(run.steps[5].added_rows, 6u);
  EXPECT_THROW(RetrainPersonalized(*w.context, {}, IntegrationPolicy{}, *w.evaluator,
                                   *w.baseline_report),
               Error);
}

TEST(RetrainPersonalized, SingleInstanceEqualsGlobal) {
  const auto& w = World();
  const auto rejected = PoolWith(Outcome::kReject);
  const std::vector<FeedbackInstance> fb = {Fb(rejected[2], FeedbackLabel::kUnfair, 1)};
  for (auto kind : {PolicyKind::kLabels, PolicyKind::kLabelsUnfairPlusWeights}) {
    IntegrationPolicy policy{kind};
    const auto run =
        RetrainPersonalized(*w.context, fb, policy, *w.evaluator, *w.baseline_report);
    const auto global = RetrainGlobal(*w.context, fb, policy, *w.evaluator, *w.baseline_report);
    ASSERT_EQ(run.steps.size(), 1u);
    EXPECT_EQ(run.steps[0].model->fingerprint(), global.model->fingerprint());
    const auto* track = run.series.Find(MetricId::kAccuracy);
    ASSERT_NE(track, nullptr);
    EXPECT_EQ(track->points[0].cma, track->points[0].raw);
  }
}

FeedbackSession NewSession() {
  const auto& w = World();
  return FeedbackSession("p1", w.context, w.evaluator, w.baseline_report);
}

TEST(Session, UndoRestoresBitExactly) {
  auto session = NewSession();
  EXPECT_EQ(CodeOf([&] { session.Undo(); }), ErrorCode::kConflict);
  const auto rejected = PoolWith(Outcome::kReject);
  const auto base_fp = session.state().model->fingerprint();
  const auto base_report = fairness::ToJson(*session.state().report);
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 1000);
  const auto first_fp = session.state().model->fingerprint();
  EXPECT_NE(first_fp, base_fp);
  EXPECT_TRUE(session.IsLocked(rejected[0]));
  EXPECT_EQ(session.StatusOf(rejected[0]), ApplicationStatus::kUnfair);
  session.Submit(rejected[1], FeedbackLabel::kWeightsOnly, RawWeights{{"Gender", 0.0}}, 1000);
  EXPECT_GT(session.log()[1].feedback.timestamp_ms, session.log()[0].feedback.timestamp_ms);
  EXPECT_EQ(session.StatusOf(rejected[1]), ApplicationStatus::kChecked);
  session.Undo();
  EXPECT_EQ(session.state().model->fingerprint(), first_fp);
  EXPECT_FALSE(session.IsLocked(rejected[1]));
  session.Undo();
  EXPECT_EQ(session.state().model->fingerprint(), base_fp);
  EXPECT_EQ(fairness::ToJson(*session.state().report), base_report);
  EXPECT_FALSE(session.IsLocked(rejected[0]));
  EXPECT_EQ(session.StatusOf(rejected[0]), ApplicationStatus::kUnchecked);
}

TEST(Session, FlipInvolution) {
  auto session = NewSession();
  const auto rejected = PoolWith(Outcome::kReject);
  const auto rows = session.state().training_rows;
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 1);
  const auto once = session.state().model->fingerprint();
  session.Undo();
  EXPECT_EQ(session.state().training_rows, rows);
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 2);
  EXPECT_EQ(session.state().model->fingerprint(), once);
}

TEST(Session, SubmitErrors) {
  auto session = NewSession();
  const auto rejected = PoolWith(Outcome::kReject);
  EXPECT_EQ(CodeOf([&] { session.Submit("nope", FeedbackLabel::kUnfair, std::nullopt, 1); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(CodeOf([&] { session.Submit(rejected[0], FeedbackLabel::kFair, std::nullopt, 1); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] {
              session.Submit(rejected[0], FeedbackLabel::kWeightsOnly, std::nullopt, 1);
            }),
            ErrorCode::kUnprocessable);
  EXPECT_EQ(CodeOf([&] {
              session.Submit(rejected[0], FeedbackLabel::kUnfair, RawWeights{{"Age", -1}}, 1);
            }),
            ErrorCode::kUnprocessable);
  RawWeights zeros;
  for (const auto& [feature, value] : World().context->baseline_weights.values()) zeros[feature] = 0;
  EXPECT_EQ(CodeOf([&] { session.Submit(rejected[0], FeedbackLabel::kWeightsOnly, zeros, 1); }),
            ErrorCode::kUnprocessable);
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 1);
  EXPECT_EQ(CodeOf([&] { session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 2); }),
            ErrorCode::kConflict);
  EXPECT_EQ(session.undo_depth(), 1u);
}

TEST(Session, LockedRowsKeepShownPrediction) {
  auto session = NewSession();
  const auto& pool = World().context->app_pool;
  const auto rejected = PoolWith(Outcome::kReject);
  const std::size_t row = *pool.IndexOfId(rejected[0]);
  const auto shown = session.DisplayedPrediction(row);
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 1);
  EXPECT_EQ(session.DisplayedPrediction(row).probability, shown.probability);
  // Unlocked rows always show the current model.
  for (std::size_t r = 0; r < pool.num_rows(); ++r) {
    if (r == row) continue;
    EXPECT_EQ(session.DisplayedPrediction(r).probability,
              session.state().pool_predictions[r].probability);
  }
}

TEST(Session, SnapshotRestoreIsExact) {
  auto session = NewSession();
  const auto rejected = PoolWith(Outcome::kReject);
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 1);
  session.Submit(rejected[1], FeedbackLabel::kUnfair, RawWeights{{"Age", 2.0}}, 2);
  const auto snapshot = nlohmann::json::parse(session.SnapshotJson().dump());
  auto restored = NewSession();
  restored.RestoreSnapshot(snapshot);
  EXPECT_EQ(restored.state().model->fingerprint(), session.state().model->fingerprint());
  EXPECT_EQ(restored.FeedbackLog(), session.FeedbackLog());
  restored.Undo();
  session.Undo();
  EXPECT_EQ(restored.state().model->fingerprint(), session.state().model->fingerprint());
}

TEST(Session, StateMatchesReplayOfLog) {
  auto session = NewSession();
  const auto rejected = PoolWith(Outcome::kReject);
  session.Submit(rejected[0], FeedbackLabel::kUnfair, std::nullopt, 1);
  session.Submit(rejected[3], FeedbackLabel::kWeightsOnly, RawWeights{{"Income Amount", 4.0}}, 2);
  session.Submit(rejected[2], FeedbackLabel::kUnfair, std::nullopt, 3);
  const auto& w = World();
  const auto log = session.FeedbackLog();
  const auto replay = RetrainOnSequence(*w.context, log, session.policy(), *w.evaluator,
                                        *w.baseline_report);
  EXPECT_EQ(replay.model->fingerprint(), session.state().model->fingerprint());
}

}  // namespace
}  // namespace fairloop::integration
