#ifndef EVIL_CURVE_H_
#define EVIL_CURVE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evil {

struct CurvePoint {
  std::int64_t interactions = 0;
  double performance = 0.0;
};

// Performance J(pi, r) sampled after every policy update.
class TrainingCurve {
 public:
  TrainingCurve() = default;
  explicit TrainingCurve(std::string reward_name) : reward_name_(std::move(reward_name)) {}

  // Throws if interactions does not strictly increase.
  void append(std::int64_t interactions, double performance);

  const std::vector<CurvePoint>& points() const { return points_; }
  const std::string& reward_name() const { return reward_name_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  double final_performance() const;

  TrainingCurve scaled(double alpha) const;

 private:
  std::string reward_name_;
  std::vector<CurvePoint> points_;
};

// Running sum of per-update performance (not a trapezoid over interactions).
double auc(const TrainingCurve& curve);

// First interaction count whose performance reaches threshold.
std::optional<std::int64_t> interactions_to_threshold(const TrainingCurve& curve, double threshold);

// Pointwise mean of curves sampled on the same interaction grid.
TrainingCurve mean_curve(const std::vector<TrainingCurve>& curves);

// Pointwise mean by update index for curves of equal length whose
// interaction grids may differ (early termination); interactions are the
// rounded mean, bumped where needed to stay strictly increasing.
TrainingCurve mean_curve_by_update(const std::vector<TrainingCurve>& curves);

// CSV: interactions,performance,reward_name,seed
void write_curve_csv(std::ostream& out, const TrainingCurve& curve, std::uint64_t seed,
                     bool header = true);

}  // namespace evil

#endif  // EVIL_CURVE_H_
