#ifndef EVIL_ADAM_H_
#define EVIL_ADAM_H_

#include <algorithm>

#include <Eigen/Core>

namespace evil {

// Adam on a flat parameter vector. step() descends along grad.
class Adam {
 public:
  explicit Adam(Eigen::Index size, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad, double lr);
  void reset();
  long steps() const { return t_; }

 private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
};

// Linear interpolation from start (step 0) to end (step total - 1).
struct LinearSchedule {
  double start = 1e-3;
  double end = 1e-3;

  double at(long step, long total) const {
    if (total <= 1) return start;
    const double frac = static_cast<double>(step) / static_cast<double>(total - 1);
    return start + (end - start) * std::min(1.0, std::max(0.0, frac));
  }
};

}  // namespace evil

#endif  // EVIL_ADAM_H_
