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

#include "fairloop/gbdt/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "fairloop/common/hash.h"
#include "fairloop/common/random.h"

namespace fairloop::gbdt {

double Sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

GradientPair LogisticGradient(double margin, int target, double weight) {
  const double p = Sigmoid(margin);
  return {weight * (p - static_cast<double>(target)), weight * p * (1.0 - p)};
}

double WeightedLogLoss(double margin, int target, double weight) {
  // softplus(x) = log(1 + e^x)
  auto softplus = [](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  };
  return weight * (target == 1 ? softplus(-margin) : softplus(margin));
}

double SplitGain(double grad_left, double hess_left, double grad_right,
                 double hess_right, double lambda, double gamma) {
  auto score = [lambda](double g, double h) {
    const double denom = h + lambda;
    return denom > 0.0 ? g * g / denom : 0.0;
  };
  return 0.5 * (score(grad_left, hess_left) + score(grad_right, hess_right) -
                score(grad_left + grad_right, hess_left + hess_right)) -
         gamma;
}

namespace {

std::uint64_t TreeSeed(std::uint64_t seed, std::size_t tree_index) {
  // splitmix64 finalizer over (seed, tree)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tree_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<std::size_t> SampleGroups(std::span<const double> group_weights,
                                      double colsample, std::uint64_t seed,
                                      std::size_t tree_index) {
  const std::size_t total = group_weights.size();
  std::size_t want = static_cast<std::size_t>(
      std::ceil(colsample * static_cast<double>(total) - 1e-9));
  want = std::max<std::size_t>(want, 1);
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), 0);
  if (want >= total) return all;

  std::vector<std::size_t> remaining;
  for (std::size_t g = 0; g < total; ++g) {
    if (group_weights[g] > 0.0) remaining.push_back(g);
  }
  if (remaining.size() <= want) return remaining;

  Rng rng(TreeSeed(seed, tree_index));
  std::vector<std::size_t> chosen;
  while (chosen.size() < want) {
    double sum = 0.0;
    for (std::size_t g : remaining) sum += group_weights[g];
    const double u = rng.Uniform() * sum;
    double cumulative = 0.0;
    std::size_t pick = remaining.size() - 1;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      cumulative += group_weights[remaining[k]];
      if (u < cumulative) {
        pick = k;
        break;
      }
    }
    chosen.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

struct Candidate {
  double gain = 0.0;
  double threshold = 0.0;
  bool valid = false;
};

// Training state for the rows with positive weight, in compact order.
class Booster {
 public:
  Booster(const data::EncodedMatrix& matrix, const GbdtParams& params,
          std::vector<std::size_t> active, const InstanceWeights& weights)
      : params_(params), n_(active.size()), num_columns_(matrix.num_columns()) {
    values_.resize(num_columns_ * n_);
    target_.resize(n_);
    weight_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      target_[i] = matrix.target()[active[i]];
      weight_[i] = weights[active[i]];
    }
    for (std::size_t c = 0; c < num_columns_; ++c) {
      const auto col = matrix.column(c);
      for (std::size_t i = 0; i < n_; ++i) values_[c * n_ + i] = col[active[i]];
    }
    sorted_.resize(num_columns_);
    for (std::size_t c = 0; c < num_columns_; ++c) {
      auto& order = sorted_[c];
      order.resize(n_);
      std::iota(order.begin(), order.end(), 0u);
      const double* v = &values_[c * n_];
      std::stable_sort(order.begin(), order.end(),
                       [v](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
    }
    grad_.resize(n_);
    hess_.resize(n_);
    position_.resize(n_);
  }

  double BaseScore(Warnings* warnings) const {
    double positive = 0.0;
    double negative = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      (target_[i] == 1 ? positive : negative) += weight_[i];
    }
    if (positive == 0.0 || negative == 0.0) {
      Warn(warnings, "training target has a single class; the model is degenerate");
    }
    const double p = std::clamp(positive / (positive + negative), 1e-6, 1.0 - 1e-6);
    return std::log(p / (1.0 - p));
  }

  // Grows one tree on the current margins and adds its output to them.
  RegressionTree GrowTree(std::vector<double>& margins,
                          const std::vector<std::size_t>& columns,
                          const std::vector<double>& column_gain_scale) {
    for (std::size_t i = 0; i < n_; ++i) {
      const GradientPair gp = LogisticGradient(margins[i], target_[i], weight_[i]);
      grad_[i] = gp.grad;
      hess_[i] = gp.hess;
    }
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::vector<double> node_grad(1, 0.0);
    std::vector<double> node_hess(1, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      node_grad[0] += grad_[i];
      node_hess[0] += hess_[i];
    }
    std::fill(position_.begin(), position_.end(), 0);

    std::vector<std::int32_t> frontier = {0};
    for (int depth = 0; depth < params_.max_depth && !frontier.empty(); ++depth) {
      std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        slot_of[static_cast<std::size_t>(frontier[s])] = static_cast<std::int32_t>(s);
      }
      std::vector<double> slot_grad(frontier.size());
      std::vector<double> slot_hess(frontier.size());
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        slot_grad[s] = node_grad[static_cast<std::size_t>(frontier[s])];
        slot_hess[s] = node_hess[static_cast<std::size_t>(frontier[s])];
      }

      std::vector<Candidate> best(columns.size() * frontier.size());
      auto scan = [&](std::size_t begin, std::size_t end) {
        std::vector<double> gl(frontier.size());
        std::vector<double> hl(frontier.size());
        std::vector<double> last(frontier.size());
        std::vector<char> seen(frontier.size());
        for (std::size_t k = begin; k < end; ++k) {
          const std::size_t c = columns[k];
          const double scale = column_gain_scale[c];
          const double* v = &values_[c * n_];
          std::fill(gl.begin(), gl.end(), 0.0);
          std::fill(hl.begin(), hl.end(), 0.0);
          std::fill(seen.begin(), seen.end(), 0);
          Candidate* out = &best[k * frontier.size()];
          for (std::uint32_t i : sorted_[c]) {
            const std::int32_t s = slot_of[static_cast<std::size_t>(position_[i])];
            if (s < 0) continue;
            const auto slot = static_cast<std::size_t>(s);
            const double x = v[i];
            if (seen[slot] && x != last[slot]) {
              const double hr = slot_hess[slot] - hl[slot];
              if (hl[slot] >= params_.min_child_weight &&
                  hr >= params_.min_child_weight) {
                const double gr = slot_grad[slot] - gl[slot];
                const double gain =
                    scale * SplitGain(gl[slot], hl[slot], gr, hr, params_.lambda, 0.0) -
                    params_.gamma;
                if (!out[slot].valid || gain > out[slot].gain) {
                  out[slot] = {gain, x, true};
                }
              }
            }
            gl[slot] += grad_[i];
            hl[slot] += hess_[i];
            last[slot] = x;
            seen[slot] = 1;
          }
        }
      };
      RunParallel(columns.size(), scan);

      std::vector<std::int32_t> next;
      std::vector<std::int32_t> split_column(tree.nodes.size(), -1);
      std::vector<double> split_threshold(tree.nodes.size(), 0.0);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        double best_gain = 0.0;
        std::int32_t best_column = -1;
        double best_threshold = 0.0;
        for (std::size_t k = 0; k < columns.size(); ++k) {
          const Candidate& cand = best[k * frontier.size() + s];
          if (cand.valid && cand.gain > best_gain) {
            best_gain = cand.gain;
            best_column = static_cast<std::int32_t>(columns[k]);
            best_threshold = cand.threshold;
          }
        }
        if (best_column < 0) continue;
        const auto node = static_cast<std::size_t>(frontier[s]);
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        node_grad.resize(tree.nodes.size(), 0.0);
        node_hess.resize(tree.nodes.size(), 0.0);
        TreeNode& n = tree.nodes[node];
        n.column = best_column;
        n.threshold = best_threshold;
        n.left = left;
        n.right = left + 1;
        split_column[node] = best_column;
        split_threshold[node] = best_threshold;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;
      for (std::size_t i = 0; i < n_; ++i) {
        const auto node = static_cast<std::size_t>(position_[i]);
        if (node >= split_column.size() || split_column[node] < 0) continue;
        const auto c = static_cast<std::size_t>(split_column[node]);
        const TreeNode& n = tree.nodes[node];
        position_[i] = values_[c * n_ + i] < split_threshold[node] ? n.left : n.right;
        const auto child = static_cast<std::size_t>(position_[i]);
        node_grad[child] += grad_[i];
        node_hess[child] += hess_[i];
      }
      frontier = std::move(next);
    }

    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      TreeNode& n = tree.nodes[k];
      if (!n.is_leaf()) continue;
      const double denom = node_hess[k] + params_.lambda;
      n.value = denom > 0.0 ? -node_grad[k] / denom * params_.learning_rate : 0.0;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      margins[i] += tree.nodes[static_cast<std::size_t>(position_[i])].value;
    }
    return tree;
  }

  std::size_t size() const { return n_; }

 private:
  template <typename Fn>
  void RunParallel(std::size_t count, Fn&& fn) const {
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(params_.num_threads), count);
    if (threads <= 1) {
      fn(0, count);
      return;
    }
    std::vector<std::thread> workers;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& w : workers) w.join();
  }

  const GbdtParams& params_;
  std::size_t n_;
  std::size_t num_columns_;
  std::vector<double> values_;  // column-major, compact rows
  std::vector<int> target_;
  std::vector<double> weight_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<double> grad_;
  std::vector<double> hess_;
  std::vector<std::int32_t> position_;
};

std::string Fingerprint(const data::EncodedMatrix& matrix, const GbdtParams& params,
                        const std::vector<std::size_t>& active,
                        const InstanceWeights& weights,
                        const std::vector<std::string>& groups,
                        const FeatureWeights& feature_weights) {
  Fingerprinter fp;
  fp.Update(std::string_view("fairloop.gbdt.v1"));
  fp.Update(params.n_trees);
  fp.Update(params.max_depth);
  fp.Update(params.learning_rate);
  fp.Update(params.lambda);
  fp.Update(params.gamma);
  fp.Update(params.colsample_bytree);
  fp.Update(params.min_child_weight);
  fp.Update(params.seed);
  fp.Update(static_cast<int>(params.feature_weight_mode));
  fp.Update(static_cast<std::uint64_t>(matrix.num_columns()));
  for (const auto& col : matrix.columns()) fp.Update(col.Name());
  for (const auto& g : groups) {
    fp.Update(g);
    fp.Update(feature_weights.at(g));
  }
  fp.Update(static_cast<std::uint64_t>(active.size()));
  for (std::size_t r : active) {
    fp.Update(matrix.target()[r]);
    fp.Update(weights[r]);
    for (std::size_t c = 0; c < matrix.num_columns(); ++c) fp.Update(matrix.at(r, c));
  }
  return fp.Hex();
}

}  // namespace

Model Train(const data::EncodedMatrix& matrix, const GbdtParams& params,
            const InstanceWeights& instance_weights,
            const FeatureWeights& feature_weights, Warnings* warnings) {
  params.Validate();
  if (matrix.num_rows() == 0) Fail(ErrorCode::kInvalidArgument, "empty training set");
  if (!matrix.has_target()) {
    Fail(ErrorCode::kFailedPrecondition, "training matrix has no target");
  }
  ValidateInstanceWeights(instance_weights, matrix.num_rows());

  const std::vector<std::string> groups = matrix.GroupNames();
  std::vector<double> group_weight(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    group_weight[g] = feature_weights.at(groups[g]);
  }
  std::vector<std::size_t> column_group(matrix.num_columns());
  for (std::size_t c = 0, g = 0; c < matrix.num_columns(); ++c) {
    while (matrix.columns()[c].feature != groups[g]) ++g;
    column_group[c] = g;
  }

  std::vector<std::size_t> active;
  for (std::size_t r = 0; r < matrix.num_rows(); ++r) {
    if (instance_weights[r] > 0.0) active.push_back(r);
  }
  std::string fingerprint = Fingerprint(matrix, params, active, instance_weights,
                                        groups, feature_weights);

  const bool gain_scaling = params.feature_weight_mode == FeatureWeightMode::kGainScaling;
  std::vector<double> sampling_weight =
      gain_scaling ? std::vector<double>(groups.size(), 1.0) : group_weight;
  std::vector<double> column_gain_scale(matrix.num_columns(), 1.0);
  if (gain_scaling) {
    for (std::size_t c = 0; c < matrix.num_columns(); ++c) {
      column_gain_scale[c] =
          group_weight[column_group[c]] * static_cast<double>(groups.size());
    }
  }

  Booster booster(matrix, params, std::move(active), instance_weights);
  const double base_score = booster.BaseScore(warnings);
  std::vector<double> margins(booster.size(), base_score);
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    const auto chosen = SampleGroups(sampling_weight, params.colsample_bytree,
                                     params.seed, static_cast<std::size_t>(t));
    std::vector<char> allowed(groups.size(), 0);
    for (std::size_t g : chosen) allowed[g] = 1;
    std::vector<std::size_t> columns;
    for (std::size_t c = 0; c < matrix.num_columns(); ++c) {
      if (allowed[column_group[c]]) columns.push_back(c);
    }
    trees.push_back(booster.GrowTree(margins, columns, column_gain_scale));
  }

  std::vector<std::string> names;
  names.reserve(matrix.num_columns());
  for (const auto& col : matrix.columns()) names.push_back(col.Name());
  return Model(std::move(trees), base_score, params, feature_weights,
               std::move(names), std::move(fingerprint));
}

}  // namespace fairloop::gbdt
