#pragma once

#include <cstdint>
#include <span>

namespace exch {

/// Streaming mean/variance (Welford), mergeable with Chan's pairwise update.
class RunningStats {
 public:
  void push(double v) noexcept;
  /// Merging into an empty accumulator reproduces `other` bit for bit.
  void merge(const RunningStats& other) noexcept;

  std::int64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Sample variance with divisor n - 1; zero when n < 2.
  double variance() const noexcept;
  double sd() const noexcept;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double mean(std::span<const double> xs);
/// Two-pass sample variance (divisor n - 1).
double sample_variance(std::span<const double> xs);

/// Effective sample size from Geyer's initial positive sequence: pairs of
/// consecutive autocorrelations are summed while the pair sum stays positive.
/// Returns the series length for a constant series.
double effective_sample_size(std::span<const double> xs);

}  // namespace exch
