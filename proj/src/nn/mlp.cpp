#include "envi/nn/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "envi/core/error.hpp"

namespace envi::nn {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kLinear: return "linear";
  }
  return "linear";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "linear") return Activation::kLinear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::size_t Architecture::parameter_count() const {
  std::size_t count = 0;
  std::size_t inputs = input_dim;
  for (const auto& layer : layers) {
    count += layer.outputs * inputs + layer.outputs;
    inputs = layer.outputs;
  }
  return count;
}

void Architecture::validate() const {
  if (input_dim == 0) throw ConfigError("network input dimension must be positive");
  if (layers.empty()) throw ConfigError("network needs at least one layer");
  for (const auto& layer : layers) {
    if (layer.outputs == 0) throw ConfigError("layer width must be positive");
  }
}

Architecture environment_model_architecture(std::size_t input_dim) {
  return {input_dim,
          {{256, Activation::kTanh}, {256, Activation::kTanh}, {1, Activation::kTanh}}};
}

Architecture discriminator_architecture(std::size_t input_dim) {
  return {input_dim,
          {{256, Activation::kRelu}, {256, Activation::kRelu}, {1, Activation::kSigmoid}}};
}

Architecture critic_architecture(std::size_t input_dim) {
  return {input_dim,
          {{256, Activation::kTanh}, {256, Activation::kTanh}, {1, Activation::kLinear}}};
}

template <typename Scalar>
void apply_activation(Activation act,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& values) {
  switch (act) {
    case Activation::kTanh:
      values = values.array().tanh().matrix();
      break;
    case Activation::kRelu:
      values = values.cwiseMax(Scalar(0));
      break;
    case Activation::kSigmoid:
      values = (Scalar(1) / (Scalar(1) + (-values.array()).exp())).matrix();
      break;
    case Activation::kLinear:
      break;
  }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> activation_derivative(
    Activation act, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& pre,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& post) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  switch (act) {
    case Activation::kTanh:
      return (Scalar(1) - post.array().square()).matrix();
    case Activation::kRelu:
      return (pre.array() > Scalar(0)).template cast<Scalar>().matrix();
    case Activation::kSigmoid:
      return (post.array() * (Scalar(1) - post.array())).matrix();
    case Activation::kLinear:
      break;
  }
  return M::Ones(pre.rows(), pre.cols());
}

template <typename Scalar>
bool all_finite(std::span<const Scalar> values) {
  // A non-finite element makes the sum non-finite; the exact scan only runs
  // when the cheap test fails (or the sum merely overflowed).
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Map<const Vec> v(values.data(), static_cast<Eigen::Index>(values.size()));
  return std::isfinite(v.sum()) || v.allFinite();
}

template <typename Scalar>
Mlp<Scalar>::Mlp(Architecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  std::size_t offset = 0;
  std::size_t inputs = arch_.input_dim;
  for (const auto& layer : arch_.layers) {
    offsets_.push_back(offset);
    offset += layer.outputs * inputs + layer.outputs;
    inputs = layer.outputs;
  }
  params_.assign(offset, Scalar(0));
}

template <typename Scalar>
Mlp<Scalar> Mlp<Scalar>::initialized(Architecture arch, std::uint64_t seed) {
  Mlp net(std::move(arch));
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const double bound = std::sqrt(1.0 / static_cast<double>(net.layer_inputs(k)));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    auto w = net.weight(k);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(uniform(rng));
    auto b = net.bias(k);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = static_cast<Scalar>(uniform(rng));
  }
  return net;
}

template <typename Scalar>
std::size_t Mlp<Scalar>::layer_inputs(std::size_t layer) const {
  return layer == 0 ? arch_.input_dim : arch_.layers[layer - 1].outputs;
}

template <typename Scalar>
std::size_t Mlp<Scalar>::bias_offset(std::size_t layer) const {
  return offsets_[layer] + arch_.layers[layer].outputs * layer_inputs(layer);
}

template <typename Scalar>
typename Mlp<Scalar>::MatrixMap Mlp<Scalar>::weight(std::size_t layer) {
  return MatrixMap(params_.data() + offsets_[layer],
                   static_cast<Eigen::Index>(arch_.layers[layer].outputs),
                   static_cast<Eigen::Index>(layer_inputs(layer)));
}

template <typename Scalar>
typename Mlp<Scalar>::ConstMatrixMap Mlp<Scalar>::weight(std::size_t layer) const {
  return ConstMatrixMap(params_.data() + offsets_[layer],
                        static_cast<Eigen::Index>(arch_.layers[layer].outputs),
                        static_cast<Eigen::Index>(layer_inputs(layer)));
}

template <typename Scalar>
typename Mlp<Scalar>::VectorMap Mlp<Scalar>::bias(std::size_t layer) {
  return VectorMap(params_.data() + bias_offset(layer),
                   static_cast<Eigen::Index>(arch_.layers[layer].outputs));
}

template <typename Scalar>
typename Mlp<Scalar>::ConstVectorMap Mlp<Scalar>::bias(std::size_t layer) const {
  return ConstVectorMap(params_.data() + bias_offset(layer),
                        static_cast<Eigen::Index>(arch_.layers[layer].outputs));
}

template <typename Scalar>
typename Mlp<Scalar>::Matrix Mlp<Scalar>::forward(const MatrixRef& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_dim()) {
    throw ConfigError("network expects " + std::to_string(input_dim()) +
                      " inputs, got " + std::to_string(inputs.rows()));
  }
  Matrix h = inputs;
  for (std::size_t k = 0; k < layer_count(); ++k) {
    Matrix pre = weight(k) * h;
    pre.colwise() += bias(k);
    apply_activation(arch_.layers[k].activation, pre);
    h = std::move(pre);
  }
  return h;
}

template <typename Scalar>
typename Mlp<Scalar>::Vector Mlp<Scalar>::forward(std::span<const Scalar> input) const {
  const Eigen::Map<const Matrix> column(input.data(), static_cast<Eigen::Index>(input.size()), 1);
  return forward(column);
}

template <typename Scalar>
typename Mlp<Scalar>::Trace Mlp<Scalar>::forward_trace(const MatrixRef& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_dim()) {
    throw ConfigError("network expects " + std::to_string(input_dim()) +
                      " inputs, got " + std::to_string(inputs.rows()));
  }
  Trace trace;
  trace.input = inputs;
  for (std::size_t k = 0; k < layer_count(); ++k) {
    const Matrix& h = k == 0 ? trace.input : trace.post.back();
    Matrix pre = weight(k) * h;
    pre.colwise() += bias(k);
    Matrix post = pre;
    apply_activation(arch_.layers[k].activation, post);
    trace.pre.push_back(std::move(pre));
    trace.post.push_back(std::move(post));
  }
  return trace;
}

template <typename Scalar>
typename Mlp<Scalar>::Matrix Mlp<Scalar>::forward_from(std::size_t layer, Matrix pre,
                                                       std::vector<Matrix>* pre_out) const {
  if (pre_out) pre_out->clear();
  for (std::size_t k = layer; k < layer_count(); ++k) {
    if (k > layer) {
      Matrix next = weight(k) * pre;
      next.colwise() += bias(k);
      pre = std::move(next);
    }
    if (pre_out) pre_out->push_back(pre);
    apply_activation(arch_.layers[k].activation, pre);
  }
  return pre;
}

template <typename Scalar>
std::vector<Scalar> Mlp<Scalar>::backward(const Trace& trace, const MatrixRef& output_grad,
                                          GradientSite site) const {
  if (trace.post.size() != layer_count() ||
      output_grad.rows() != trace.output().rows() ||
      output_grad.cols() != trace.output().cols()) {
    throw ConfigError("backward: output gradient shape does not match forward trace");
  }
  std::vector<Scalar> grads(params_.size(), Scalar(0));
  const std::size_t last = layer_count() - 1;
  Matrix delta = site == GradientSite::kPreActivation
                     ? Matrix(output_grad)
                     : Matrix(output_grad.cwiseProduct(activation_derivative<Scalar>(
                           arch_.layers[last].activation, trace.pre[last], trace.post[last])));
  for (std::size_t k = layer_count(); k-- > 0;) {
    const Matrix& below = k == 0 ? trace.input : trace.post[k - 1];
    MatrixMap gw(grads.data() + offsets_[k], delta.rows(), below.rows());
    VectorMap gb(grads.data() + bias_offset(k), delta.rows());
    gw.noalias() = delta * below.transpose();
    // Reduce into an aligned temporary: Eigen's result for an unaligned
    // destination depends on the address.
    const Vector bias_grad = delta.rowwise().sum();
    gb = bias_grad;
    if (k > 0) {
      Matrix up = weight(k).transpose() * delta;
      delta = up.cwiseProduct(activation_derivative<Scalar>(
          arch_.layers[k - 1].activation, trace.pre[k - 1], trace.post[k - 1]));
    }
  }
  return grads;
}

template <typename Scalar>
bool Mlp<Scalar>::all_finite() const {
  return nn::all_finite<Scalar>(params_);
}

template class Mlp<float>;
template class Mlp<double>;
template void apply_activation<float>(Activation, Eigen::MatrixXf&);
template void apply_activation<double>(Activation, Eigen::MatrixXd&);
template Eigen::MatrixXf activation_derivative<float>(Activation, const Eigen::MatrixXf&,
                                                      const Eigen::MatrixXf&);
template Eigen::MatrixXd activation_derivative<double>(Activation, const Eigen::MatrixXd&,
                                                       const Eigen::MatrixXd&);
template bool all_finite<float>(std::span<const float>);
template bool all_finite<double>(std::span<const double>);

}  // namespace envi::nn
