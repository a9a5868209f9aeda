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

#include "support/oracles.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace fairloop::testing::oracle {
namespace {

struct Counts {
  double n = 0, accept = 0, truth_accept = 0, truth_reject = 0, tp = 0, fp = 0;
};

std::map<std::string, Counts> Tally(const Labels& pred, const std::vector<int>* truth,
                                    const Groups& groups) {
  std::map<std::string, Counts> out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    Counts& c = out[groups[i]];
    const bool acc = pred[i] == Outcome::kAccept;
    c.n += 1;
    c.accept += acc;
    if (truth != nullptr) {
      const bool truth_acc = (*truth)[i] == 0;
      c.truth_accept += truth_acc;
      c.truth_reject += !truth_acc;
      c.tp += acc && truth_acc;
      c.fp += acc && !truth_acc;
    }
  }
  return out;
}

using RateFn = std::optional<double> (*)(const Counts&);

std::optional<double> Sel(const Counts& c) { return c.accept / c.n; }
std::optional<double> Tpr(const Counts& c) {
  if (c.truth_accept == 0) return std::nullopt;
  return c.tp / c.truth_accept;
}
std::optional<double> Fpr(const Counts& c) {
  if (c.truth_reject == 0) return std::nullopt;
  return c.fp / c.truth_reject;
}
std::optional<double> Ppv(const Counts& c) {
  if (c.accept == 0) return std::nullopt;
  return c.tp / c.accept;
}

// All group rates, or nullopt if fewer than two groups or any is undefined.
std::optional<std::vector<double>> Rates(const std::map<std::string, Counts>& t, RateFn fn) {
  if (t.size() < 2) return std::nullopt;
  std::vector<double> out;
  for (const auto& [g, c] : t) {
    const auto r = fn(c);
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  return out;
}

std::optional<double> MaxPairGap(const std::optional<std::vector<double>>& r) {
  if (!r) return std::nullopt;
  double best = 0.0;
  for (std::size_t a = 0; a < r->size(); ++a) {
    for (std::size_t b = 0; b < r->size(); ++b) best = std::max(best, std::fabs((*r)[a] - (*r)[b]));
  }
  return best;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::optional<double> Dpr(const Labels& pred, const Groups& groups) {
  const auto r = Rates(Tally(pred, nullptr, groups), Sel);
  if (!r) return std::nullopt;
  // Smallest ratio over every ordered pair with a non-zero denominator.
  std::optional<double> best;
  bool any_positive = false;
  for (double a : *r) {
    for (double b : *r) {
      if (b <= 0.0) continue;
      any_positive = true;
      const double ratio = a / b;
      if (!best || ratio < *best) best = ratio;
    }
  }
  if (!any_positive) return std::nullopt;
  return best;
}

std::optional<double> Eod(const Labels& pred, const std::vector<int>& truth, const Groups& groups) {
  return MaxPairGap(Rates(Tally(pred, &truth, groups), Tpr));
}

std::optional<double> AodMinMax(const Labels& pred, const std::vector<int>& truth,
                                const Groups& groups) {
  const auto t = Tally(pred, &truth, groups);
  const auto tpr = MaxPairGap(Rates(t, Tpr));
  const auto fpr = MaxPairGap(Rates(t, Fpr));
  if (!tpr || !fpr) return std::nullopt;
  return 0.5 * (*tpr + *fpr);
}

std::optional<double> AodPairwise(const Labels& pred, const std::vector<int>& truth,
                                  const Groups& groups) {
  const auto t = Tally(pred, &truth, groups);
  const auto tpr = Rates(t, Tpr);
  const auto fpr = Rates(t, Fpr);
  if (!tpr || !fpr) return std::nullopt;
  double best = 0.0;
  for (std::size_t a = 0; a < tpr->size(); ++a) {
    for (std::size_t b = 0; b < tpr->size(); ++b) {
      best = std::max(best, 0.5 * (std::fabs((*tpr)[a] - (*tpr)[b]) +
                                   std::fabs((*fpr)[a] - (*fpr)[b])));
    }
  }
  return best;
}

std::optional<double> Ppd(const Labels& pred, const std::vector<int>& truth, const Groups& groups) {
  return MaxPairGap(Rates(Tally(pred, &truth, groups), Ppv));
}

std::optional<double> Cdd(const Labels& pred, const Groups& groups, const Groups& strata) {
  std::set<std::string> all_groups(groups.begin(), groups.end());
  if (all_groups.size() < 2) return std::nullopt;
  std::set<std::string> all_strata;
  for (std::size_t i = 0; i < pred.size(); ++i) all_strata.insert(strata.empty() ? "" : strata[i]);
  std::map<std::string, double> weighted;
  double used = 0.0;
  for (const auto& s : all_strata) {
    double size = 0, rej = 0, acc = 0;
    std::map<std::string, double> g_rej, g_acc;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (!strata.empty() && strata[i] != s) continue;
      size += 1;
      if (pred[i] == Outcome::kReject) {
        rej += 1;
        g_rej[groups[i]] += 1;
      } else {
        acc += 1;
        g_acc[groups[i]] += 1;
      }
    }
    if (rej == 0 || acc == 0) continue;
    used += size;
    for (const auto& g : all_groups) weighted[g] += size * (g_rej[g] / rej - g_acc[g] / acc);
  }
  if (used == 0) return std::nullopt;
  std::optional<double> best;
  for (const auto& [g, w] : weighted) {
    const double dd = w / used;
    if (!best || dd > *best) best = dd;
  }
  return best;
}

std::optional<double> Consistency(const Labels& pred,
                                  const std::vector<std::vector<double>>& points, int k) {
  const std::size_t n = pred.size();
  if (k <= 0 || static_cast<std::size_t>(k) >= n) return std::nullopt;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < points[i].size(); ++c) {
        s += (points[i][c] - points[j][c]) * (points[i][c] - points[j][c]);
      }
      d.emplace_back(s, j);  // squared distance orders identically
    }
    std::sort(d.begin(), d.end());
    double mean = 0.0;
    for (int m = 0; m < k; ++m) mean += pred[d[static_cast<std::size_t>(m)].second] == Outcome::kAccept;
    mean /= k;
    total += std::fabs((pred[i] == Outcome::kAccept ? 1.0 : 0.0) - mean);
  }
  return 1.0 - total / static_cast<double>(n);
}

std::optional<double> Theil(const Labels& pred, const std::vector<int>& truth) {
  const std::size_t n = pred.size();
  std::vector<double> b(n);
  double mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double yhat = pred[i] == Outcome::kAccept ? 1.0 : 0.0;
    const double y = truth[i] == 0 ? 1.0 : 0.0;
    b[i] = yhat - y + 1.0;
    mu += b[i];
  }
  mu /= static_cast<double>(n);
  if (mu == 0.0) return std::nullopt;
  double sum = 0.0;
  for (double v : b) {
    if (v > 0.0) sum += (v / mu) * std::log(v / mu);
  }
  return sum / static_cast<double>(n);
}

double Accuracy(const Labels& pred, const std::vector<int>& truth) {
  double correct = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    correct += (pred[i] == Outcome::kReject) == (truth[i] == 1);
  }
  return correct / static_cast<double>(pred.size());
}

std::optional<double> Counterfactual(const gbdt::Model& model, const data::Encoder& encoder,
                                     const data::Dataset& dataset, const std::string& attribute,
                                     const data::BinningRule* rule) {
  const std::size_t f = dataset.schema().RequireIndex(attribute);
  const bool numeric = dataset.schema().feature(f).kind == data::FeatureKind::kNumeric;
  // Substitute per "value key": the category itself or the bin index.
  std::map<std::string, data::Cell> substitute;
  std::vector<std::string> key(dataset.num_rows());
  if (numeric) {
    std::map<std::size_t, std::vector<double>> by_bin;
    for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
      const double v = std::get<double>(dataset.cell(i, f));
      const std::size_t bin = rule->BinOf(v);
      by_bin[bin].push_back(v);
      key[i] = std::to_string(bin);
    }
    for (const auto& [bin, values] : by_bin) substitute[std::to_string(bin)] = Median(values);
  } else {
    for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
      key[i] = std::get<std::string>(dataset.cell(i, f));
      substitute[key[i]] = dataset.cell(i, f);
    }
  }
  if (substitute.size() < 2) return std::nullopt;
  auto label_of = [&](const data::Dataset& one) {
    const auto m = encoder.Transform(one);
    return model.Predict(m.Row(0)).label;
  };
  double invariant = 0.0;
  for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
    const std::size_t idx[] = {i};
    const data::Dataset original = dataset.Select(idx);
    const Outcome base = label_of(original);
    bool same = true;
    for (const auto& [k, value] : substitute) {
      if (k == key[i]) continue;
      std::vector<std::vector<data::Cell>> rows = {
          std::vector<data::Cell>(original.row(0).begin(), original.row(0).end())};
      rows[0][f] = value;
      if (label_of(original.WithRows(rows)) != base) same = false;
    }
    invariant += same;
  }
  return invariant / static_cast<double>(dataset.num_rows());
}

long double LogLoss(long double margin, int target, long double weight) {
  // log(1 + e^m) - y m, stable for both signs.
  const long double softplus =
      margin > 0 ? margin + std::log1p(std::exp(-margin)) : std::log1p(std::exp(margin));
  return weight * (softplus - static_cast<long double>(target) * margin);
}

std::optional<Stump> BestStump(const std::vector<std::vector<double>>& rows,
                               const std::vector<int>& target,
                               const std::vector<double>& weights, double lambda,
                               double gamma, double min_child_weight,
                               double learning_rate) {
  const std::size_t n = rows.size();
  double pos = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pos += weights[i] * target[i];
    tot += weights[i];
  }
  const double prior = std::clamp(pos / tot, 1e-6, 1.0 - 1e-6);
  const double base = std::log(prior / (1.0 - prior));
  const double p = 1.0 / (1.0 + std::exp(-base));
  std::vector<double> g(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = weights[i] * (p - target[i]);
    h[i] = weights[i] * p * (1.0 - p);
  }
  auto score = [&](double G, double H) { return G * G / (H + lambda); };
  std::optional<Stump> best;
  std::vector<double> gains;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    std::set<double> values;
    for (const auto& r : rows) values.insert(r[c]);
    for (double t : values) {
      if (t == *values.begin()) continue;
      double gl = 0, hl = 0, gr = 0, hr = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (rows[i][c] < t) {
          gl += g[i];
          hl += h[i];
        } else {
          gr += g[i];
          hr += h[i];
        }
      }
      if (hl < min_child_weight || hr < min_child_weight) continue;
      const double gain = 0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - gamma;
      gains.push_back(gain);
      if (gain > 0.0 && (!best || gain > best->gain)) {
        best = Stump{static_cast<int>(c), t, gain, -gl / (hl + lambda) * learning_rate,
                     -gr / (hr + lambda) * learning_rate, 0.0};
      }
    }
  }
  if (best) {
    std::sort(gains.rbegin(), gains.rend());
    best->second_best_gain = gains.size() > 1 ? gains[1] : 0.0;
  }
  return best;
}

bool PerfectDepth2TreeExists(const std::vector<std::vector<double>>& rows,
                             const std::vector<int>& target) {
  const std::size_t cols = rows[0].size();
  std::vector<std::pair<std::size_t, double>> splits;
  for (std::size_t c = 0; c < cols; ++c) {
    std::set<double> values;
    for (const auto& r : rows) values.insert(r[c]);
    for (double t : values) splits.emplace_back(c, t);
  }
  // A side is pure after at most one more split if some split separates it.
  auto separable = [&](const std::vector<std::size_t>& idx) {
    auto pure = [&](const std::vector<std::size_t>& s) {
      for (std::size_t i : s) {
        if (target[i] != target[s.front()]) return false;
      }
      return true;
    };
    if (idx.empty() || pure(idx)) return true;
    for (const auto& [c, t] : splits) {
      std::vector<std::size_t> l, r;
      for (std::size_t i : idx) (rows[i][c] < t ? l : r).push_back(i);
      if ((l.empty() || pure(l)) && (r.empty() || pure(r))) return true;
    }
    return false;
  };
  for (const auto& [c, t] : splits) {
    std::vector<std::size_t> l, r;
    for (std::size_t i = 0; i < rows.size(); ++i) (rows[i][c] < t ? l : r).push_back(i);
    if (separable(l) && separable(r)) return true;
  }
  return false;
}

}  // namespace fairloop::testing::oracle
