#include "islanddb/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace islanddb {

void MetricsCollector::record_freshness_us(const std::vector<double>& samples) {
  if (samples.empty()) return;
  std::lock_guard<std::mutex> lk(mutex_);
  freshness_us_.insert(freshness_us_.end(), samples.begin(), samples.end());
}

void MetricsCollector::record_ship_us(double micros) {
  std::lock_guard<std::mutex> lk(mutex_);
  ship_total_us_ += micros;
  ship_count_ += 1;
}

void MetricsCollector::record_apply_us(double micros) {
  std::lock_guard<std::mutex> lk(mutex_);
  apply_total_us_ += micros;
  apply_count_ += 1;
}

void MetricsCollector::fill(MetricsSnapshot& out) const {
  std::vector<double> freshness;
  {
    std::lock_guard<std::mutex> lk(mutex_);
    freshness = freshness_us_;
    out.ship_rounds = ship_count_;
    out.ship_mean_us = ship_count_ == 0 ? 0.0 : ship_total_us_ / static_cast<double>(ship_count_);
    out.applied_batches = apply_count_;
    out.apply_mean_us =
        apply_count_ == 0 ? 0.0 : apply_total_us_ / static_cast<double>(apply_count_);
  }
  out.freshness_samples = freshness.size();
  if (!freshness.empty()) {
    double total = 0.0;
    for (double v : freshness) total += v;
    out.freshness_mean_us = total / static_cast<double>(freshness.size());
    out.freshness_p99_us = quantile(std::move(freshness), 0.99);
  }
}

void MetricsCollector::reset() {
  std::lock_guard<std::mutex> lk(mutex_);
  freshness_us_.clear();
  ship_total_us_ = 0.0;
  ship_count_ = 0;
  apply_total_us_ = 0.0;
  apply_count_ = 0;
}

double quantile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  if (samples.size() == 1) return samples[0];
  const double rank = p * static_cast<double>(samples.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return samples[lo] * (1.0 - frac) + samples[hi] * frac;
}

}  // namespace islanddb
