#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace envi::nn {

enum class Activation { kTanh, kRelu, kSigmoid, kLinear };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

struct LayerSpec {
  std::size_t outputs = 0;
  Activation activation = Activation::kLinear;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Architecture {
  std::size_t input_dim = 0;
  std::vector<LayerSpec> layers;

  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().outputs; }
  std::size_t parameter_count() const;
  void validate() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// input -> 256 tanh -> 256 tanh -> 1 tanh
Architecture environment_model_architecture(std::size_t input_dim = 20);
// input -> 256 ReLU -> 256 ReLU -> 1 sigmoid
Architecture discriminator_architecture(std::size_t input_dim = 21);
// input -> 256 tanh -> 256 tanh -> 1 linear (value estimates are unbounded)
Architecture critic_architecture(std::size_t input_dim = 20);

// Fully connected feed-forward network. All parameters live in one flat
// buffer; layer k stores its weight (outputs x inputs, column-major)
// followed by its bias. Gradients use the same layout. Batches are
// column-per-sample matrices.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;
  using MatrixRef = Eigen::Ref<const Matrix>;

  enum class GradientSite { kOutput, kPreActivation };

  // Intermediate values of a batch forward pass, consumed by backward().
  struct Trace {
    Matrix input;
    std::vector<Matrix> pre;   // pre-activation of each layer
    std::vector<Matrix> post;  // activation output of each layer
    const Matrix& output() const { return post.back(); }
  };

  // Empty network with no layers.
  Mlp() = default;
  // All parameters zero.
  explicit Mlp(Architecture arch);
  // Weights and biases uniform in +-sqrt(1/fan_in).
  static Mlp initialized(Architecture arch, std::uint64_t seed);

  const Architecture& architecture() const { return arch_; }
  std::size_t input_dim() const { return arch_.input_dim; }
  std::size_t output_dim() const { return arch_.output_dim(); }
  std::size_t layer_count() const { return arch_.layers.size(); }
  std::size_t parameter_count() const { return params_.size(); }
  std::size_t layer_inputs(std::size_t layer) const;

  MatrixMap weight(std::size_t layer);
  ConstMatrixMap weight(std::size_t layer) const;
  VectorMap bias(std::size_t layer);
  ConstVectorMap bias(std::size_t layer) const;
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const;

  std::span<Scalar> parameters() { return params_; }
  std::span<const Scalar> parameters() const { return params_; }

  Matrix forward(const MatrixRef& inputs) const;
  Vector forward(std::span<const Scalar> input) const;
  Trace forward_trace(const MatrixRef& inputs) const;

  // Runs layers `layer`.. given that layer's pre-activations. When `pre_out`
  // is set it receives the pre-activations of every layer from `layer` on.
  Matrix forward_from(std::size_t layer, Matrix pre,
                      std::vector<Matrix>* pre_out = nullptr) const;

  // Reverse-mode gradient of sum(output .* output_grad) summed over the
  // batch. With kPreActivation, `output_grad` is taken with respect to the
  // last layer's pre-activation (e.g. a logit).
  std::vector<Scalar> backward(const Trace& trace, const MatrixRef& output_grad,
                               GradientSite site = GradientSite::kOutput) const;

  bool all_finite() const;

  template <typename Other>
  Mlp<Other> cast() const {
    Mlp<Other> out(arch_);
    auto dst = out.parameters();
    for (std::size_t i = 0; i < params_.size(); ++i) dst[i] = static_cast<Other>(params_[i]);
    return out;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.arch_ == b.arch_ && a.params_ == b.params_;
  }

 private:
  Architecture arch_;
  std::vector<std::size_t> offsets_;
  // Aligned so vectorized reductions over the parameter maps do not depend on
  // where the allocator placed the buffer.
  std::vector<Scalar, Eigen::aligned_allocator<Scalar>> params_;
};

// Elementwise activation and its derivative (from pre- and post-activation).
template <typename Scalar>
void apply_activation(Activation act,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& values);
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> activation_derivative(
    Activation act, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& pre,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& post);

template <typename Scalar>
bool all_finite(std::span<const Scalar> values);

extern template class Mlp<float>;
extern template class Mlp<double>;

}  // namespace envi::nn
