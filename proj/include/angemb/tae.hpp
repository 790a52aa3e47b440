#ifndef ANGEMB_TAE_HPP
#define ANGEMB_TAE_HPP

/**
 * @file tae.hpp
 * @brief Trimmed Angular Embedding: cosine pre-trimming followed by AE.
 *
 * Every sample is tried as a stand-in for the leading direction; tau[i]
 * counts the samples whose absolute cosine to it falls strictly below
 * cos(eta_theta). The sample with the fewest such counts (smallest index on
 * ties) is the pivot, and exactly the samples it rejects are trimmed.
 */

#include <algorithm>
#include <atomic>
#include <iterator>
#include <thread>
#include <vector>

#include "angemb/ae.hpp"

namespace angemb {

inline constexpr Index kDefaultBlock = 256;

struct TaeConfig {
  FitConfig fit;
  Index block = kDefaultBlock;
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// Rows [row_begin, row_begin + values.rows()) of C = U^T U.
struct CosineBlock {
  Index row_begin = 0;
  Eigen::MatrixXd values;
};

/// Lazily evaluated row blocks of the pairwise cosine matrix.
class CosineGram {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = CosineBlock;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = CosineBlock;

    iterator(const CosineGram* owner, Index row) : owner_(owner), row_(row) {}
    CosineBlock operator*() const { return owner_->block_at(row_); }
    iterator& operator++() {
      row_ = std::min(row_ + owner_->block_, owner_->m());
      return *this;
    }
    bool operator==(const iterator& other) const { return row_ == other.row_; }

   private:
    const CosineGram* owner_;
    Index row_;
  };

  CosineGram(const Eigen::MatrixXd& units, Index block) : units_(&units), block_(block) {
    if (block < 1) throw Error(ErrorCode::InvalidData, "cosine block size must be >= 1");
  }

  Index m() const { return units_->cols(); }
  Index block_size() const { return block_; }

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, m()}; }

  /// The block that starts at `row` (a multiple of the block size).
  CosineBlock block_at(Index row) const {
    const Index rows = std::min(block_, m() - row);
    CosineBlock out;
    out.row_begin = row;
    out.values = units_->middleCols(row, rows).transpose() * (*units_);
    return out;
  }

  /// The block containing `row`.
  CosineBlock block_containing(Index row) const { return block_at((row / block_) * block_); }

 private:
  const Eigen::MatrixXd* units_;
  Index block_;
};

inline CosineGram cosine_gram(const SphereData& u, Index block = kDefaultBlock) { return {u.units, block}; }

namespace detail {

inline double require_threshold(double eta_theta) {
  if (!(eta_theta > 0.0 && eta_theta < std::numbers::pi / 2)) {
    throw Error(ErrorCode::InvalidThreshold,
                "eta_theta must lie strictly inside (0, pi/2), got " + std::to_string(eta_theta));
  }
  const double c = std::cos(eta_theta);
  if (!(c > 0.0 && c < 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "cos(eta_theta) must lie strictly inside (0, 1)");
  }
  return c;
}

inline Index count_below(const CosineBlock& blk, Index local_row, double threshold) {
  const Index self = blk.row_begin + local_row;
  Index count = 0;
  const auto row = blk.values.row(local_row);
  for (Index j = 0; j < row.size(); ++j) {
    if (j != self && std::abs(row[j]) < threshold) ++count;
  }
  return count;
}

}  // namespace detail

/// tau[i] = #{ j != i : |u_i . u_j| < cos(eta_theta) }.
inline std::vector<Index> outlier_counts(const SphereData& u, double eta_theta, Index block = kDefaultBlock,
                                         unsigned threads = 1) {
  const double threshold = detail::require_threshold(eta_theta);
  const CosineGram gram = cosine_gram(u, block);
  std::vector<Index> tau(static_cast<std::size_t>(u.m()), 0);

  const Index n_blocks = (u.m() + block - 1) / block;
  auto work = [&](Index b) {
    const CosineBlock blk = gram.block_at(b * block);
    for (Index r = 0; r < blk.values.rows(); ++r) {
      tau[static_cast<std::size_t>(blk.row_begin + r)] = detail::count_below(blk, r, threshold);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const Index workers = std::min<Index>(threads, n_blocks);
  if (workers <= 1) {
    for (Index b = 0; b < n_blocks; ++b) work(b);
    return tau;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index b = next++; b < n_blocks; b = next++) work(b);
    });
  }
  for (auto& t : pool) t.join();
  return tau;
}

struct Selection {
  TrimReport report;
  SphereData inliers;  // `dropped` lists the trimmed columns
};

/**
 * Picks the pivot (smallest argmin of tau) and splits U by the pivot's row of
 * the cosine matrix. `block` must match the value given to outlier_counts so
 * the pivot row is evaluated by the same product.
 */
inline Selection select_inliers(const SphereData& u, const std::vector<Index>& tau, double eta_theta,
                                Index block = kDefaultBlock) {
  const double threshold = detail::require_threshold(eta_theta);
  if (static_cast<Index>(tau.size()) != u.m() || tau.empty()) {
    throw Error(ErrorCode::InvalidData, "tau length does not match sample count");
  }
  const auto best = std::min_element(tau.begin(), tau.end());

  Selection out;
  TrimReport& rep = out.report;
  rep.eta_theta = eta_theta;
  rep.cos_threshold = threshold;
  rep.tau = tau;
  rep.tau_min = *best;
  rep.pivot = static_cast<Index>(best - tau.begin());

  const CosineBlock blk = cosine_gram(u, block).block_containing(rep.pivot);
  const auto row = blk.values.row(rep.pivot - blk.row_begin);
  for (Index j = 0; j < u.m(); ++j) {
    if (j != rep.pivot && std::abs(row[j]) < threshold) {
      rep.outliers.push_back(j);
    } else {
      rep.inliers.push_back(j);
    }
  }

  out.inliers.source_n = u.m();
  out.inliers.dropped = rep.outliers;
  out.inliers.units.resize(u.D(), static_cast<Index>(rep.inliers.size()));
  for (std::size_t k = 0; k < rep.inliers.size(); ++k) {
    out.inliers.units.col(static_cast<Index>(k)) = u.units.col(rep.inliers[k]);
  }
  return out;
}

inline FitModel fit_tae(const DataMatrix& x, Index d, double eta_theta, const TaeConfig& config = {}) {
  detail::Stopwatch clock;
  detail::require_threshold(eta_theta);
  if (d < 1) throw Error(ErrorCode::InvalidRank, "requested " + std::to_string(d) + " components");
  auto [mean, centered] = center(x);
  const SphereData sphere = normalize_columns(centered, config.fit.zero_tol);
  const std::vector<Index> tau = outlier_counts(sphere, eta_theta, config.block, config.threads);
  Selection sel = select_inliers(sphere, tau, eta_theta, config.block);

  const Index kept = sel.inliers.m();
  if (kept < d) {
    throw Error(ErrorCode::InvalidRank, std::to_string(kept) + " inliers remain after trimming, need " +
                                            std::to_string(d));
  }

  FitModel model;
  model.mean = std::move(mean);
  model.method = Method::Tae;
  model.fit_stats.strategy_used = resolve_strategy(sphere.D(), kept, d, config.fit.strategy);
  model.subspace = dominant_subspace(sel.inliers, d, config.fit.strategy, config.fit.seed);
  model.fit_stats.samples_used = kept;
  model.fit_stats.trimmed = sel.report.tau_min;
  model.fit_stats.dropped_zero_norm = static_cast<Index>(sphere.dropped.size());
  model.trim = std::move(sel.report);
  model.fit_stats.wall_time_s = clock.seconds();
  return model;
}

}  // namespace angemb

#endif  // ANGEMB_TAE_HPP
