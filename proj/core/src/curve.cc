#include "evil/curve.h"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace evil {

void TrainingCurve::append(std::int64_t interactions, double performance) {
  if (!points_.empty() && interactions <= points_.back().interactions) {
    throw std::invalid_argument("TrainingCurve: interactions must strictly increase");
  }
  points_.push_back({interactions, performance});
}

double TrainingCurve::final_performance() const {
  if (points_.empty()) throw std::logic_error("TrainingCurve: empty curve has no final value");
  return points_.back().performance;
}

TrainingCurve TrainingCurve::scaled(double alpha) const {
  TrainingCurve out(reward_name_);
  for (const auto& p : points_) out.append(p.interactions, alpha * p.performance);
  return out;
}

double auc(const TrainingCurve& curve) {
  if (curve.empty()) throw std::invalid_argument("auc: empty curve");
  double total = 0.0;
  for (const auto& p : curve.points()) total += p.performance;
  return total;
}

std::optional<std::int64_t> interactions_to_threshold(const TrainingCurve& curve, double threshold) {
  for (const auto& p : curve.points()) {
    if (p.performance >= threshold) return p.interactions;
  }
  return std::nullopt;
}

TrainingCurve mean_curve(const std::vector<TrainingCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("mean_curve: no curves");
  TrainingCurve out(curves.front().reward_name());
  const std::size_t n = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != n) throw std::invalid_argument("mean_curve: curves differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    const auto x = curves.front().points()[i].interactions;
    for (const auto& c : curves) {
      if (c.points()[i].interactions != x) {
        throw std::invalid_argument("mean_curve: curves use different interaction grids");
      }
      sum += c.points()[i].performance;
    }
    out.append(x, sum / static_cast<double>(curves.size()));
  }
  return out;
}

TrainingCurve mean_curve_by_update(const std::vector<TrainingCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("mean_curve_by_update: no curves");
  const std::size_t n = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != n) throw std::invalid_argument("mean_curve_by_update: curves differ in length");
  }
  TrainingCurve out(curves.front().reward_name());
  const double k = static_cast<double>(curves.size());
  std::int64_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0, y = 0.0;
    for (const auto& c : curves) {
      x += static_cast<double>(c.points()[i].interactions);
      y += c.points()[i].performance;
    }
    auto xi = static_cast<std::int64_t>(std::llround(x / k));
    if (i > 0 && xi <= last) xi = last + 1;
    out.append(xi, y / k);
    last = xi;
  }
  return out;
}

void write_curve_csv(std::ostream& out, const TrainingCurve& curve, std::uint64_t seed, bool header) {
  if (header) out << "interactions,performance,reward_name,seed\n";
  const auto old = out.precision(17);
  for (const auto& p : curve.points()) {
    out << p.interactions << ',' << p.performance << ',' << curve.reward_name() << ',' << seed << '\n';
  }
  out.precision(old);
}

}  // namespace evil
