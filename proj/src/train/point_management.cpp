#include "gsaudio/train/point_management.hpp"

#include <cmath>

#include "gsaudio/error.hpp"
#include "gsaudio/scene/queries.hpp"

namespace gsaudio::train {

void GradStats::accumulate(const core::Tensor& gradient, std::span<const std::size_t> rows) {
  if (gradient.rows() != size()) throw ContractViolation("GradStats: gradient rows do not match the point count");
  for (std::size_t i : rows) {
    double s = 0.0;
    for (double g : gradient.row_span(i)) s += g * g;
    record(i, std::sqrt(s));
  }
}

void GradStats::record(std::size_t point, double magnitude) {
  if (point >= size()) throw ContractViolation("GradStats: point index out of range");
  sum_[point] += magnitude;
  ++count_[point];
}

double GradStats::theta(std::size_t point) const {
  return count_.at(point) == 0 ? 0.0 : sum_[point] / static_cast<double>(count_[point]);
}

void GradStats::reset() {
  std::fill(sum_.begin(), sum_.end(), 0.0);
  std::fill(count_.begin(), count_.end(), 0);
}

void GradStats::append(std::size_t points) {
  sum_.resize(sum_.size() + points, 0.0);
  count_.resize(count_.size() + points, 0);
}

void GradStats::select(std::span<const std::size_t> kept) {
  std::vector<double> s;
  std::vector<std::uint64_t> c;
  for (std::size_t i : kept) {
    s.push_back(sum_.at(i));
    c.push_back(count_.at(i));
  }
  sum_ = std::move(s);
  count_ = std::move(c);
}

GradStats GradStats::from(std::vector<double> sums, std::vector<std::uint64_t> counts) {
  if (sums.size() != counts.size()) throw DataError("GradStats: sums and counts differ in length");
  GradStats g;
  g.sum_ = std::move(sums);
  g.count_ = std::move(counts);
  return g;
}

std::vector<std::size_t> significant_points(const GradStats& stats, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stats.size(); ++i)
    if (stats.theta(i) > threshold) out.push_back(i);
  return out;
}

DensifyResult densify(const scene::AudioPointSet& points, GradStats& stats, double threshold,
                      std::mt19937_64& rng) {
  if (stats.size() != points.size()) throw ContractViolation("densify: stats do not cover every point");
  DensifyResult out;
  out.points = points;
  out.significant = significant_points(stats, threshold);
  out.added = out.significant.size();
  stats.reset();
  if (out.added == 0) return out;

  const std::vector<double> spread = scene::nearest_neighbor_distances(points);
  const std::size_t d = points.alpha_width();
  core::Tensor positions = core::Tensor::zeros(out.added, 3);
  core::Tensor alpha = core::Tensor::zeros(out.added, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-kNewAlphaRange, kNewAlphaRange);
  for (std::size_t k = 0; k < out.added; ++k) {
    const std::size_t parent = out.significant[k];
    double sigma = spread[parent];
    if (!std::isfinite(sigma) || sigma <= 0.0) sigma = kFallbackSpread;
    for (int a = 0; a < 3; ++a) positions(k, a) = points.positions(parent, a) + sigma * normal(rng);
    for (std::size_t j = 0; j < d; ++j) alpha(k, j) = uniform(rng);
  }
  out.points.positions.append_rows(positions);
  out.points.alpha.append_rows(alpha);
  stats.append(out.added);
  return out;
}

}  // namespace gsaudio::train
