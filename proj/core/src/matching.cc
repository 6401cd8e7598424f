// Copyright 2026 The Chartforge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>

#include "chartforge/error.h"
#include "chartforge/eval_core.h"

namespace chartforge {
namespace {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// O(rows^2 * cols). Returns the column of each row.
std::vector<int> assign_rows(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Matching hungarian_match(const ScoreMatrix& scores, const EligibilityMatrix& eligible) {
  if (scores.size() != eligible.size()) {
    fail(ErrorCode::kShapeMismatch, "score and eligibility matrices differ in rows");
  }
  const size_t n = scores.size();
  const size_t m = n == 0 ? 0 : scores[0].size();
  for (size_t i = 0; i < n; ++i) {
    if (scores[i].size() != m || eligible[i].size() != m) {
      fail(ErrorCode::kShapeMismatch, "matrix rows have different lengths");
    }
  }

  Matching result;
  result.score_matrix.assign(n, std::vector<double>(m, std::nan("")));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool any = false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (!eligible[i][j]) continue;
      if (!std::isfinite(scores[i][j])) {
        fail(ErrorCode::kInvalidArgument, "eligible scores must be finite");
      }
      result.score_matrix[i][j] = scores[i][j];
      lo = std::min(lo, scores[i][j]);
      hi = std::max(hi, scores[i][j]);
      any = true;
    }
  }
  if (!any) return result;

  // Each eligible pair is worth `big` plus its shifted score; `big` exceeds
  // the largest possible score gain, so cardinality is maximized first.
  const size_t k = std::min(n, m);
  const double range = hi - lo;
  const double big = static_cast<double>(k) * range + 1.0;
  const bool transpose = n > m;
  const size_t rows = transpose ? m : n;
  const size_t cols = transpose ? n : m;
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (!eligible[i][j]) continue;
      const double w = big + (scores[i][j] - lo);
      (transpose ? cost[j][i] : cost[i][j]) = -w;
    }
  }
  const auto assignment = assign_rows(cost);
  for (size_t r = 0; r < rows; ++r) {
    const int c = assignment[r];
    if (c < 0) continue;
    const size_t i = transpose ? static_cast<size_t>(c) : r;
    const size_t j = transpose ? r : static_cast<size_t>(c);
    if (!eligible[i][j]) continue;
    result.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    result.total_score += scores[i][j];
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace chartforge
