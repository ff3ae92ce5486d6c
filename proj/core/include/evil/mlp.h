#ifndef EVIL_MLP_H_
#define EVIL_MLP_H_

#include <vector>

#include <Eigen/Core>

#include "evil/rng.h"

namespace evil {

// Feed-forward network with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector, layer by layer: W (out x in,
// column-major) followed by b.
class Mlp {
 public:
  struct Tape {
    std::vector<Eigen::VectorXd> activations;  // input, then each hidden layer
  };

  Mlp() = default;
  // widths = {input, hidden..., output}
  explicit Mlp(std::vector<int> widths);

  // Fan-in scaled normal init; the output layer is scaled by output_gain.
  void init(Rng& rng, double output_gain = 1.0);

  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& mutable_params() { return params_; }
  void set_params(const Eigen::VectorXd& p);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x, Tape& tape) const;
  // dparams += J^T dout, with J the output Jacobian wrt the parameters.
  void backward(const Tape& tape, const Eigen::VectorXd& dout,
                Eigen::Ref<Eigen::VectorXd> dparams) const;

  // Scalar-output networks only: gradient of the output wrt the input.
  Eigen::VectorXd input_gradient(const Eigen::VectorXd& x) const;
  // Scalar-output networks only: returns P = (||df/dx|| - target)^2 and adds
  // scale * dP/dparams into dparams (second-order backprop through the
  // input-gradient computation).
  double gradient_penalty(const Eigen::VectorXd& x, double target, double scale,
                          Eigen::Ref<Eigen::VectorXd> dparams) const;

 private:
  struct Layer {
    int in;
    int out;
    int offset;  // start of W in params_; b follows at offset + in * out
  };
  Eigen::Map<const Eigen::MatrixXd> weight(int l) const {
    return {params_.data() + layers_[l].offset, layers_[l].out, layers_[l].in};
  }
  Eigen::Map<const Eigen::VectorXd> bias(int l) const {
    return {params_.data() + layers_[l].offset + layers_[l].in * layers_[l].out, layers_[l].out};
  }

  std::vector<int> widths_;
  std::vector<Layer> layers_;
  Eigen::VectorXd params_;
};

}  // namespace evil

#endif  // EVIL_MLP_H_
