#include "envi/il/bc.hpp"

#include <cmath>
#include <string>

#include "envi/core/error.hpp"
#include "envi/nn/denormals.hpp"

namespace envi::il {

double bc_step(nn::Mlp<float>& mean, nn::AdamState<float>& optimizer, const GroupBatch& group) {
  const auto trace = mean.forward_trace(group.inputs);
  const Eigen::MatrixXf residual = trace.output() - group.targets;
  const auto n = static_cast<float>(residual.cols());
  const double loss = residual.cast<double>().squaredNorm() / static_cast<double>(n);
  if (!std::isfinite(loss)) throw NumericalError("BC loss is not finite");
  const Eigen::MatrixXf grad = (2.0f / n) * residual;
  const auto grads = mean.backward(trace, grad);
  nn::adam_step<float>(mean, grads, optimizer);
  return loss;
}

TrainedModel train_bc(nn::GaussianHead<float> model, const Dataset& data,
                      const BcHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  const nn::FlushDenormals ftz;
  if (data.samples.empty()) throw ConfigError("BC needs a non-empty dataset");
  if (model.mean.input_dim() != data.feature_dim()) {
    throw ConfigError("model input dimension does not match dataset windows");
  }
  const auto groups = make_group_batches(data);
  nn::AdamState<float> optimizer(model.mean.parameter_count(), {hyper.learning_rate});

  TrainedModel out;
  out.stochastic = false;
  out.norm = data.norm;
  out.history_length = data.history_length;
  out.provenance = {Algorithm::kBc, data.source_logs, seed, hyper.epochs};

  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double weighted = 0.0;
    std::size_t count = 0;
    for (const auto& group : groups) {
      try {
        weighted += bc_step(model.mean, optimizer, group) * static_cast<double>(group.targets.cols());
      } catch (const NumericalError& e) {
        throw NumericalError("BC epoch " + std::to_string(epoch) + ", log " +
                             std::to_string(group.source_log) + ": " + e.what());
      }
      count += static_cast<std::size_t>(group.targets.cols());
    }
    if (!model.mean.all_finite()) {
      throw NumericalError("BC epoch " + std::to_string(epoch) + ": non-finite parameters");
    }
    EpochRecord record;
    record.epoch = epoch;
    record.loss_bc = weighted / static_cast<double>(count);
    out.trace.epochs.push_back(record);
  }
  out.head = std::move(model);
  return out;
}

}  // namespace envi::il
