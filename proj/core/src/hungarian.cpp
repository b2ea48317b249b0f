// Kuhn-Munkres with row/column potentials, O(n^3).

#include <algorithm>
#include <cmath>

#include "qsched/ilp.hpp"

namespace qsched::ilp {

Matching hungarian(const std::vector<std::vector<double>>& weights) {
  Matching out;
  const std::size_t rows = weights.size();
  std::size_t cols = 0;
  for (const auto& r : weights) cols = std::max(cols, r.size());
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return out;

  auto usable = [&](std::size_t i, std::size_t j) {
    if (i >= rows || j >= weights[i].size()) return 0.0;
    const double w = weights[i][j];
    return std::isfinite(w) && w > 0.0 ? w : 0.0;
  };

  // Minimise -w over perfect matchings of the zero-padded square matrix.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -usable(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j];
    if (i == 0 || i > rows || j > weights[i - 1].size()) continue;
    const double w = weights[i - 1][j - 1];
    if (std::isfinite(w) && w > 0.0) {
      out.row_to_col[static_cast<int>(i - 1)] = static_cast<int>(j - 1);
      out.total += w;
    }
  }
  return out;
}

}  // namespace qsched::ilp
