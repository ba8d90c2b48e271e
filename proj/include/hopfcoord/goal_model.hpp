#ifndef HOPFCOORD_GOAL_MODEL_HPP_
#define HOPFCOORD_GOAL_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hopfcoord/errors.hpp"
#include "hopfcoord/norms.hpp"

namespace hopfcoord {

// Slack on |p|_* <= 1 when deciding conjugate feasibility.
inline constexpr double kConjugateDomainTolerance = 1e-12;

// A contiguous run of state components sharing one radius.
struct GoalBlock {
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
  double radius = 0.0;
};

struct ConjugateValue {
  double value = std::numeric_limits<double>::infinity();
  Vector subgradient;
  bool feasible = false;
};

// Convex goal region Omega = {x : |x_k - c_k| <= r_k for every block k}.
//
// With r = r_0 (the first block's radius) the region is the r-ball of the
// block-scaled norm |y| = r * max_k |y_k| / r_k, and the implicit surface is
// J(x) = |x - c| - r. With a single block this is the plain norm ball
// J(x) = |x - c| - r. The conjugate is <p, c> + r on the dual ball
// sum_k (r_k / r) |p_k|_* <= 1 and +infinity outside.
class GoalRegion {
 public:
  GoalRegion(Vector center, double radius, NormKind norm, std::string label = {})
      : GoalRegion(std::move(center),
                   std::vector<GoalBlock>{{0, 0, radius}}, norm, std::move(label)) {}

  // Blocks must tile [0, dim(center)) in order. A block with size 0 is
  // expanded to cover the remaining components.
  GoalRegion(Vector center, std::vector<GoalBlock> blocks, NormKind norm,
             std::string label = {})
      : center_(std::move(center)), blocks_(std::move(blocks)), norm_(norm),
        label_(std::move(label)) {
    if (center_.size() == 0) {
      throw InvalidArgument("goal '" + label_ + "': empty center");
    }
    if (!center_.allFinite()) {
      throw InvalidArgument("goal '" + label_ + "': non-finite center");
    }
    if (blocks_.empty()) {
      throw InvalidArgument("goal '" + label_ + "': no blocks");
    }
    Eigen::Index next = 0;
    for (auto& block : blocks_) {
      if (block.size == 0) block.size = center_.size() - next;
      if (block.offset != next || block.size <= 0 ||
          block.offset + block.size > center_.size()) {
        throw InvalidArgument("goal '" + label_ + "': blocks must tile the state");
      }
      if (!(block.radius > 0.0) || !std::isfinite(block.radius)) {
        throw InvalidArgument("goal '" + label_ + "': radius must be positive");
      }
      next += block.size;
    }
    if (next != center_.size()) {
      throw InvalidArgument("goal '" + label_ + "': blocks must tile the state");
    }
  }

  const Vector& center() const { return center_; }
  double radius() const { return blocks_.front().radius; }
  NormKind norm_kind() const { return norm_; }
  const std::vector<GoalBlock>& blocks() const { return blocks_; }
  const std::string& label() const { return label_; }
  Eigen::Index dim() const { return center_.size(); }

  // J(x): negative inside, zero on the boundary, positive outside.
  double eval_implicit(const Vector& x) const {
    check_dim(x, "eval_implicit");
    return region_norm(x - center_) - radius();
  }

  bool contains(const Vector& x) const {
    check_dim(x, "contains");
    for (const auto& b : blocks_) {
      if (norm(x.segment(b.offset, b.size) - center_.segment(b.offset, b.size),
               norm_) > b.radius) {
        return false;
      }
    }
    return true;
  }

  ConjugateValue eval_conjugate(const Vector& p) const {
    check_dim(p, "eval_conjugate");
    ConjugateValue out;
    if (dual_norm_of(p) <= 1.0 + kConjugateDomainTolerance) {
      out.value = p.dot(center_) + radius();
      out.subgradient = center_;
      out.feasible = true;
    } else {
      out.subgradient = Vector::Zero(p.size());
    }
    return out;
  }

  // |y| for the region's block-scaled norm.
  double region_norm(const Vector& y) const {
    double worst = 0.0;
    for (const auto& b : blocks_) {
      worst = std::max(worst, norm(y.segment(b.offset, b.size), norm_) / b.radius);
    }
    return worst * radius();
  }

  // The dual norm sum_k (r_k / r) |p_k|_*; the conjugate's domain is its
  // unit ball.
  double dual_norm_of(const Vector& p) const {
    double total = 0.0;
    for (const auto& b : blocks_) {
      total += b.radius / radius() * dual_norm(p.segment(b.offset, b.size), norm_);
    }
    return total;
  }

  // max over the dual unit ball of <q, y>; equals region_norm(y).
  double dual_ball_support(const Vector& y) const { return region_norm(y); }

  // A maximizer of <q, y> over the dual unit ball, i.e. a subgradient of
  // region_norm at y. Returns zero for y = 0.
  Vector dual_ball_maximizer(const Vector& y) const {
    Vector q = Vector::Zero(y.size());
    const GoalBlock* best = nullptr;
    double best_score = 0.0;
    for (const auto& b : blocks_) {
      const double score =
          norm(y.segment(b.offset, b.size), norm_) / (b.radius / radius());
      if (score > best_score) {
        best_score = score;
        best = &b;
      }
    }
    if (best == nullptr) return q;
    const double a = best->radius / radius();
    const Vector seg = y.segment(best->offset, best->size);
    if (norm_ == NormKind::kTwo) {
      q.segment(best->offset, best->size) = seg / (seg.norm() * a);
    } else {
      Eigen::Index j = 0;
      seg.cwiseAbs().maxCoeff(&j);
      q[best->offset + j] = (seg[j] < 0.0 ? -1.0 : 1.0) / a;
    }
    return q;
  }

  // Euclidean projection onto {q : dual_norm_of(q) <= 1}.
  Vector project_dual(const Vector& p) const {
    check_dim(p, "project_dual");
    if (dual_norm_of(p) <= 1.0) return p;
    return project_weighted_ball(p);
  }

  // Per-component weights a with dual_norm_of(p) = sum_k |(a p)_k|_*. In the
  // variables q = a p the conjugate's domain is the unweighted group ball.
  Vector dual_scaling() const {
    Vector a(dim());
    for (const auto& b : blocks_) a.segment(b.offset, b.size).setConstant(b.radius / radius());
    return a;
  }

  // Euclidean projection onto {q : sum_k |q_k|_* <= 1}.
  Vector project_scaled_dual(const Vector& q) const {
    check_dim(q, "project_scaled_dual");
    double total = 0.0;
    for (const auto& b : blocks_) total += dual_norm(q.segment(b.offset, b.size), norm_);
    if (total <= 1.0) return q;
    // The sup-norm case is the plain 1-norm ball. For 2-norm blocks, project
    // the vector of block norms onto the 1-norm ball and rescale each block.
    if (norm_ == NormKind::kSup) return project_l1_ball(q);
    Vector norms(static_cast<Eigen::Index>(blocks_.size()));
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      norms[k] = q.segment(blocks_[k].offset, blocks_[k].size).norm();
    }
    const Vector shrunk = project_l1_ball(norms);
    Vector out = Vector::Zero(q.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      if (norms[k] > 0.0) {
        out.segment(blocks_[k].offset, blocks_[k].size) =
            q.segment(blocks_[k].offset, blocks_[k].size) * (shrunk[k] / norms[k]);
      }
    }
    return out;
  }

  void check_dim(const Vector& v, const char* where) const {
    if (v.size() != center_.size()) {
      throw DimensionMismatch(std::string(where) + ": goal '" + label_ +
                              "' has dimension " + std::to_string(center_.size()) +
                              ", got " + std::to_string(v.size()));
    }
  }

 private:
  // Projection onto the dual ball for p outside it.
  Vector project_weighted_ball(const Vector& p) const {
    if (blocks_.size() == 1) {
      return norm_ == NormKind::kTwo ? Vector(p / p.norm()) : project_l1_ball(p);
    }
    // q_k = prox_{theta a_k |.|_*}(p_k) with theta chosen so the constraint
    // is active. The constraint value is nonincreasing in theta; bisect.
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& b : blocks_) {
      const Vector seg = p.segment(b.offset, b.size);
      const double reach = norm_ == NormKind::kTwo ? seg.norm() : seg.lpNorm<Eigen::Infinity>();
      hi = std::max(hi, reach / (b.radius / radius()));
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-17 * std::max(1.0, hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (dual_norm_of(shrink(p, mid)) > 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    Vector q = shrink(p, hi);
    const double n = dual_norm_of(q);
    if (n > 1.0) q /= n;
    return q;
  }

  // Blockwise proximal map of theta * sum_k a_k |.|_*.
  Vector shrink(const Vector& p, double theta) const {
    Vector q(p.size());
    for (const auto& b : blocks_) {
      const double tau = theta * b.radius / radius();
      const Vector seg = p.segment(b.offset, b.size);
      if (norm_ == NormKind::kTwo) {
        const double n = seg.norm();
        q.segment(b.offset, b.size) =
            n > tau ? Vector(seg * (1.0 - tau / n)) : Vector::Zero(b.size);
      } else {
        for (Eigen::Index j = 0; j < b.size; ++j) {
          const double v = seg[j];
          q[b.offset + j] = std::copysign(std::max(std::abs(v) - tau, 0.0), v);
        }
      }
    }
    return q;
  }

  // Projection onto the unit 1-norm ball by sorting magnitudes.
  static Vector project_l1_ball(const Vector& p) {
    std::vector<double> mags(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) mags[j] = std::abs(p[j]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) {
      cumulative += mags[k];
      const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
      if (mags[k] > candidate) theta = candidate;
    }
    Vector q(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      q[j] = std::copysign(std::max(std::abs(p[j]) - theta, 0.0), p[j]);
    }
    return q;
  }

  Vector center_;
  std::vector<GoalBlock> blocks_;
  NormKind norm_;
  std::string label_;
};

}  // namespace hopfcoord

#endif  // HOPFCOORD_GOAL_MODEL_HPP_
