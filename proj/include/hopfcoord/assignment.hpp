#ifndef HOPFCOORD_ASSIGNMENT_HPP_
#define HOPFCOORD_ASSIGNMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hopfcoord/errors.hpp"
#include "hopfcoord/norms.hpp"

namespace hopfcoord {

// Largest size accepted by the enumeration oracles.
inline constexpr int kBruteForceLimit = 8;

// Square matrix of finite values; entry (i, j) belongs to vehicle i and goal j.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.rows() != values_.cols()) {
      throw InvalidArgument("cost matrix must be square and nonempty, got " +
                            std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()));
    }
    if (!values_.allFinite()) throw InvalidArgument("cost matrix has a non-finite entry");
  }

  int size() const { return static_cast<int>(values_.rows()); }
  double operator()(int i, int j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

struct BottleneckResult {
  std::vector<int> sigma;  // sigma[i] = goal of vehicle i (0-based)
  double bottleneck_value = 0.0;
  int bottleneck_vehicle = 0;
};

struct SumAssignmentResult {
  std::vector<int> sigma;
  double total = 0.0;
};

namespace detail {

// Perfect matching on the bipartite graph allowed(i, j), by augmenting
// paths, starting from the partial matching in `match_of_row` (-1 = free).
// Returns false if some row stays unmatched.
inline bool perfect_matching(int n, const std::function<bool(int, int)>& allowed,
                             std::vector<int>& match_of_row) {
  std::vector<int> match_of_col(n, -1);
  for (int i = 0; i < n; ++i) {
    if (match_of_row[i] >= 0) match_of_col[match_of_row[i]] = i;
  }
  std::vector<char> seen(n);
  std::function<bool(int)> augment = [&](int row) {
    for (int col = 0; col < n; ++col) {
      if (!allowed(row, col) || seen[col]) continue;
      seen[col] = 1;
      const int owner = match_of_col[col];
      if (owner < 0 || (match_of_row[owner] == col && augment(owner))) {
        match_of_col[col] = row;
        match_of_row[row] = col;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    if (match_of_row[i] >= 0) continue;
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(i)) return false;
  }
  return true;
}

inline BottleneckResult make_bottleneck(const CostMatrix& q, std::vector<int> sigma) {
  BottleneckResult out;
  out.bottleneck_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < q.size(); ++i) {
    if (q(i, sigma[i]) > out.bottleneck_value) {
      out.bottleneck_value = q(i, sigma[i]);
      out.bottleneck_vehicle = i;
    }
  }
  out.sigma = std::move(sigma);
  return out;
}

inline void check_enumeration_size(const CostMatrix& q, const char* where) {
  if (q.size() > kBruteForceLimit) {
    throw SizeLimit(std::string(where) + ": n = " + std::to_string(q.size()) +
                    " exceeds the enumeration limit " + std::to_string(kBruteForceLimit));
  }
}

}  // namespace detail

// Linear bottleneck assignment by the threshold method: binary search over
// the sorted distinct entries for the smallest threshold admitting a perfect
// matching on {(i, j) : Q(i, j) <= threshold}. Among optimal permutations the
// lexicographically smallest is returned; it is built row by row, taking the
// smallest column that still leaves a completable matching.
inline BottleneckResult solve_lbap(const CostMatrix& q) {
  const int n = q.size();
  std::vector<double> levels(q.values().data(), q.values().data() + q.values().size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Rows with fixed[i] >= 0 are pinned to that column; nobody else may take it.
  auto feasible = [&](double threshold, const std::vector<int>& fixed) {
    std::vector<char> taken(n, 0);
    for (int c : fixed)
      if (c >= 0) taken[c] = 1;
    std::vector<int> match = fixed;
    return detail::perfect_matching(
        n,
        [&](int i, int j) {
          if (fixed[i] >= 0) return j == fixed[i];
          return !taken[j] && q(i, j) <= threshold;
        },
        match);
  };
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(levels[mid], std::vector<int>(n, -1))) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double threshold = levels[lo];

  std::vector<int> sigma(n, -1);
  std::vector<char> used(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (used[j] || q(i, j) > threshold) continue;
      std::vector<int> trial = sigma;
      trial[i] = j;
      if (feasible(threshold, trial)) {
        sigma[i] = j;
        used[j] = 1;
        break;
      }
    }
  }
  return detail::make_bottleneck(q, std::move(sigma));
}

// Exhaustive min-max over all n! permutations in lexicographic order; the
// first optimum found wins ties.
inline BottleneckResult brute_force_lbap(const CostMatrix& q) {
  detail::check_enumeration_size(q, "brute_force_lbap");
  std::vector<int> sigma(q.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  BottleneckResult best = detail::make_bottleneck(q, sigma);
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    BottleneckResult candidate = detail::make_bottleneck(q, sigma);
    if (candidate.bottleneck_value < best.bottleneck_value) best = std::move(candidate);
  }
  return best;
}

// Exhaustive minimum of sum_i Q(i, sigma(i)); same tie rule.
inline SumAssignmentResult brute_force_sum_assignment(const CostMatrix& q) {
  detail::check_enumeration_size(q, "brute_force_sum_assignment");
  std::vector<int> sigma(q.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  auto total = [&](const std::vector<int>& s) {
    double sum = 0.0;
    for (int i = 0; i < q.size(); ++i) sum += q(i, s[i]);
    return sum;
  };
  SumAssignmentResult best{sigma, total(sigma)};
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    const double t = total(sigma);
    if (t < best.total) best = {sigma, t};
  }
  return best;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_ASSIGNMENT_HPP_
