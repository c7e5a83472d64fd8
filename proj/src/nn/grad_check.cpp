#include "envi/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "envi/core/error.hpp"

namespace envi::nn {
namespace {

using Matrix = Eigen::MatrixXd;

constexpr Eigen::Index kChunk = 2048;

struct Probe {
  std::size_t index;  // flat parameter index
  Eigen::Index unit;  // pre-activation row it moves
  double shift;       // pre-activation change for a +h step
};

bool crosses_kink(Activation act, double plus, double minus) {
  return act == Activation::kRelu && ((plus > 0.0) != (minus > 0.0));
}

}  // namespace

GradCheckResult grad_check(const Mlp<double>& net, std::span<const double> input,
                           double h) {
  if (!(h > 0.0)) throw ConfigError("grad_check step h must be positive");
  if (input.size() != net.input_dim()) throw ConfigError("grad_check: input size mismatch");

  const Eigen::Map<const Matrix> x(input.data(), static_cast<Eigen::Index>(input.size()), 1);
  const auto trace = net.forward_trace(x);
  const std::vector<double> analytic =
      net.backward(trace, Matrix::Ones(static_cast<Eigen::Index>(net.output_dim()), 1));

  GradCheckResult result;
  const std::size_t layers = net.layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    const Activation act = net.architecture().layers[k].activation;
    const Matrix& below = k == 0 ? trace.input : trace.post[k - 1];
    const Eigen::Index rows = trace.pre[k].rows();
    const Eigen::Index cols = below.rows();

    std::vector<Probe> probes;
    probes.reserve(static_cast<std::size_t>(rows * (cols + 1)));
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        probes.push_back({net.weight_offset(k) + static_cast<std::size_t>(j * rows + i), i,
                          h * below(j, 0)});
      }
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      probes.push_back({net.bias_offset(k) + static_cast<std::size_t>(i), i, h});
    }

    for (std::size_t start = 0; start < probes.size(); start += kChunk) {
      const auto count = static_cast<Eigen::Index>(
          std::min<std::size_t>(kChunk, probes.size() - start));
      // Columns [0, count) hold +h probes, [count, 2 count) the -h probes.
      std::vector<bool> kink(static_cast<std::size_t>(count), false);
      Matrix outputs;
      std::vector<Matrix> later_pre;
      if (k + 1 == layers) {
        Matrix pre = trace.pre[k].replicate(1, 2 * count);
        for (Eigen::Index c = 0; c < count; ++c) {
          const auto& probe = probes[start + static_cast<std::size_t>(c)];
          pre(probe.unit, c) += probe.shift;
          pre(probe.unit, count + c) -= probe.shift;
        }
        outputs = net.forward_from(k, pre, &later_pre);
      } else {
        // Only one activation of layer k changes; push the difference into
        // layer k+1's pre-activations directly.
        const auto w_next = net.weight(k + 1);
        Matrix pre_next = trace.pre[k + 1].replicate(1, 2 * count);
        Matrix unit_pre(1, 2), unit_post(1, 2);
        for (Eigen::Index c = 0; c < count; ++c) {
          const auto& probe = probes[start + static_cast<std::size_t>(c)];
          const double base_pre = trace.pre[k](probe.unit, 0);
          const double base_post = trace.post[k](probe.unit, 0);
          unit_pre << base_pre + probe.shift, base_pre - probe.shift;
          unit_post = unit_pre;
          apply_activation(act, unit_post);
          kink[static_cast<std::size_t>(c)] =
              crosses_kink(act, unit_pre(0, 0), unit_pre(0, 1));
          pre_next.col(c) += w_next.col(probe.unit) * (unit_post(0, 0) - base_post);
          pre_next.col(count + c) += w_next.col(probe.unit) * (unit_post(0, 1) - base_post);
        }
        outputs = net.forward_from(k + 1, pre_next, &later_pre);
      }
      for (std::size_t m = 0; m < later_pre.size(); ++m) {
        const Activation later_act = net.architecture().layers[layers - later_pre.size() + m].activation;
        if (later_act != Activation::kRelu) continue;
        const Matrix& pre = later_pre[m];
        for (Eigen::Index c = 0; c < count; ++c) {
          if (kink[static_cast<std::size_t>(c)]) continue;
          for (Eigen::Index r = 0; r < pre.rows(); ++r) {
            if (crosses_kink(later_act, pre(r, c), pre(r, count + c))) {
              kink[static_cast<std::size_t>(c)] = true;
              break;
            }
          }
        }
      }
      const Eigen::RowVectorXd loss = outputs.colwise().sum();
      for (Eigen::Index c = 0; c < count; ++c) {
        const auto& probe = probes[start + static_cast<std::size_t>(c)];
        if (kink[static_cast<std::size_t>(c)]) {
          result.excluded.push_back(probe.index);
          continue;
        }
        const double numeric = (loss(c) - loss(count + c)) / (2.0 * h);
        const double exact = analytic[probe.index];
        const double scale = std::max({std::abs(exact), std::abs(numeric), kGradCheckFloor});
        result.max_relative_error =
            std::max(result.max_relative_error, std::abs(exact - numeric) / scale);
        ++result.checked;
      }
    }
  }
  std::sort(result.excluded.begin(), result.excluded.end());
  return result;
}

GradCheckResult grad_check(const Mlp<float>& net, std::span<const double> input, double h) {
  return grad_check(net.cast<double>(), input, h);
}

}  // namespace envi::nn
