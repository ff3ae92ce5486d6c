#include "evil/mlp.h"

#include <cmath>
#include <stdexcept>

namespace evil {

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output widths");
  int offset = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] < 1 || widths_[l + 1] < 1) throw std::invalid_argument("Mlp: widths must be positive");
    layers_.push_back({widths_[l], widths_[l + 1], offset});
    offset += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

void Mlp::init(Rng& rng, double output_gain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& L = layers_[l];
    const double gain = (l + 1 == layers_.size()) ? output_gain : 1.0;
    const double scale = gain / std::sqrt(static_cast<double>(L.in));
    for (int i = 0; i < L.in * L.out; ++i) params_[L.offset + i] = scale * normal(rng);
    for (int i = 0; i < L.out; ++i) params_[L.offset + L.in * L.out + i] = 0.0;
  }
}

void Mlp::set_params(const Eigen::VectorXd& p) {
  if (p.size() != params_.size()) throw std::invalid_argument("Mlp::set_params: size mismatch");
  params_ = p;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd a = x;
  const int last = static_cast<int>(layers_.size()) - 1;
  for (int l = 0; l < last; ++l) a = (weight(l) * a + bias(l)).array().tanh().matrix();
  return weight(last) * a + bias(last);
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x, Tape& tape) const {
  if (x.size() != input_dim()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  const int last = static_cast<int>(layers_.size()) - 1;
  tape.activations.resize(layers_.size());
  tape.activations[0] = x;
  for (int l = 0; l < last; ++l) {
    tape.activations[l + 1] = (weight(l) * tape.activations[l] + bias(l)).array().tanh().matrix();
  }
  return weight(last) * tape.activations[last] + bias(last);
}

void Mlp::backward(const Tape& tape, const Eigen::VectorXd& dout,
                   Eigen::Ref<Eigen::VectorXd> dparams) const {
  Eigen::VectorXd delta = dout;  // gradient wrt pre-activation of layer l
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Layer& L = layers_[l];
    const Eigen::VectorXd& in = tape.activations[l];
    Eigen::Map<Eigen::MatrixXd>(dparams.data() + L.offset, L.out, L.in).noalias() += delta * in.transpose();
    dparams.segment(L.offset + L.in * L.out, L.out) += delta;
    if (l == 0) break;
    Eigen::VectorXd back = weight(l).transpose() * delta;
    delta = back.array() * (1.0 - in.array().square());
  }
}

Eigen::VectorXd Mlp::input_gradient(const Eigen::VectorXd& x) const {
  if (output_dim() != 1) throw std::logic_error("Mlp::input_gradient: scalar output required");
  Tape tape;
  forward(x, tape);
  const int last = static_cast<int>(layers_.size()) - 1;
  Eigen::VectorXd c = weight(last).transpose();  // d f / d a_last
  for (int l = last - 1; l >= 0; --l) {
    const Eigen::VectorXd delta = c.array() * (1.0 - tape.activations[l + 1].array().square());
    c = weight(l).transpose() * delta;
  }
  return c;
}

double Mlp::gradient_penalty(const Eigen::VectorXd& x, double target, double scale,
                             Eigen::Ref<Eigen::VectorXd> dparams) const {
  if (output_dim() != 1) throw std::logic_error("Mlp::gradient_penalty: scalar output required");
  const int hidden = static_cast<int>(layers_.size()) - 1;
  Tape tape;
  forward(x, tape);
  const auto& a = tape.activations;  // a[1..hidden] are hidden activations

  // Input-gradient pass, keeping intermediates:
  //   c[hidden] = w_out, delta[l] = d[l] .* c[l], c[l-1] = W_l^T delta[l]
  std::vector<Eigen::VectorXd> c(hidden + 1), d(hidden + 1), delta(hidden + 1);
  c[hidden] = weight(hidden).transpose();
  for (int l = hidden; l >= 1; --l) {
    d[l] = (1.0 - a[l].array().square()).matrix();
    delta[l] = d[l].cwiseProduct(c[l]);
    c[l - 1] = weight(l - 1).transpose() * delta[l];
  }
  const Eigen::VectorXd& g = c[0];
  const double norm = g.norm();
  const double penalty = (norm - target) * (norm - target);
  if (scale == 0.0) return penalty;

  // Reverse pass through the input-gradient computation.
  Eigen::VectorXd c_bar = (norm > 0.0) ? Eigen::VectorXd(2.0 * (norm - target) / norm * g)
                                       : Eigen::VectorXd(Eigen::VectorXd::Zero(g.size()));
  std::vector<Eigen::VectorXd> d_bar(hidden + 1);
  for (int l = 1; l <= hidden; ++l) {
    const Layer& L = layers_[l - 1];
    // c[l-1] = W_{l-1}^T delta[l]  (weight index l-1 maps a[l-1] -> a[l])
    Eigen::Map<Eigen::MatrixXd>(dparams.data() + L.offset, L.out, L.in).noalias() +=
        scale * delta[l] * c_bar.transpose();
    const Eigen::VectorXd delta_bar = weight(l - 1) * c_bar;
    d_bar[l] = c[l].cwiseProduct(delta_bar);
    c_bar = d[l].cwiseProduct(delta_bar);
  }
  // c[hidden] is the output weight row.
  dparams.segment(layers_[hidden].offset, layers_[hidden].in) += scale * c_bar;

  // d[l] = 1 - a[l]^2 feeds back into the forward pass.
  Eigen::VectorXd a_bar = -2.0 * a[hidden].cwiseProduct(d_bar[hidden]);
  for (int l = hidden; l >= 1; --l) {
    const Layer& L = layers_[l - 1];
    const Eigen::VectorXd z_bar = d[l].cwiseProduct(a_bar);
    Eigen::Map<Eigen::MatrixXd>(dparams.data() + L.offset, L.out, L.in).noalias() +=
        scale * z_bar * a[l - 1].transpose();
    dparams.segment(L.offset + L.in * L.out, L.out) += scale * z_bar;
    if (l == 1) break;
    a_bar = weight(l - 1).transpose() * z_bar - 2.0 * a[l - 1].cwiseProduct(d_bar[l - 1]);
  }
  return penalty;
}

}  // namespace evil
