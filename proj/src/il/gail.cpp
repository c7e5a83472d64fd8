#include "envi/il/gail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "envi/core/error.hpp"
#include "envi/nn/denormals.hpp"
#include "envi/il/bc.hpp"

namespace envi::il {
namespace {

using Matrix = Eigen::MatrixXf;

constexpr double kRewardEps = 1e-8;
constexpr double kMaxLogRatio = 20.0;

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

float clip_unit(float v) { return std::clamp(v, -1.0f, 1.0f); }

Matrix stack(const Matrix& windows, const Matrix& next) {
  Matrix out(windows.rows() + 1, windows.cols());
  out.topRows(windows.rows()) = windows;
  out.bottomRows(1) = next;
  return out;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + " is not finite");
}

}  // namespace

double gail_reward(double discriminator_score) {
  return -std::log(1.0 - discriminator_score + kRewardEps);
}

double gail_reward(const nn::Mlp<float>& discriminator, const HistoryWindow& window,
                   State predicted, const NormSpec& norm) {
  std::vector<float> input(2 * window.length() + 1);
  window_features<float>(window, norm, std::span<float>(input).first(2 * window.length()));
  input.back() = static_cast<float>(normalize(predicted.value, norm.state));
  return gail_reward(discriminator.forward(std::span<const float>(input))(0));
}

double discriminator_loss(const nn::Mlp<float>& discriminator, const Matrix& real,
                          const Matrix& fake) {
  const auto trace = discriminator.forward_trace(real);
  const auto trace_fake = discriminator.forward_trace(fake);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < real.cols(); ++c) loss += softplus(-trace.pre.back()(0, c));
  for (Eigen::Index c = 0; c < fake.cols(); ++c) loss += softplus(trace_fake.pre.back()(0, c));
  return loss / static_cast<double>(real.cols() + fake.cols());
}

double discriminator_update(nn::Mlp<float>& discriminator, nn::AdamState<float>& optimizer,
                            const Matrix& real, const Matrix& fake, std::size_t iters) {
  if (real.cols() == 0 || fake.cols() == 0) {
    throw ConfigError("discriminator update needs real and fake pairs");
  }
  if (real.rows() != fake.rows()) throw ConfigError("real and fake pairs differ in width");
  const Eigen::Index n_real = real.cols();
  const Eigen::Index total = real.cols() + fake.cols();
  Matrix batch(real.rows(), total);
  batch.leftCols(n_real) = real;
  batch.rightCols(fake.cols()) = fake;

  double loss = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const auto trace = discriminator.forward_trace(batch);
    const Matrix& logits = trace.pre.back();
    Matrix grad(1, total);
    loss = 0.0;
    for (Eigen::Index c = 0; c < total; ++c) {
      const double z = logits(0, c);
      const bool is_real = c < n_real;
      loss += is_real ? softplus(-z) : softplus(z);
      grad(0, c) = static_cast<float>((sigmoid(z) - (is_real ? 1.0 : 0.0)) /
                                      static_cast<double>(total));
    }
    loss /= static_cast<double>(total);
    require_finite(loss, "discriminator loss");
    const auto grads = discriminator.backward(
        trace, grad, nn::Mlp<float>::GradientSite::kPreActivation);
    nn::adam_step<float>(discriminator, grads, optimizer);
  }
  return loss;
}

AdvantageEstimate compute_gae(std::span<const double> rewards, std::span<const double> values,
                              double gamma, double lambda) {
  if (values.size() != rewards.size() + 1) {
    throw ConfigError("compute_gae: values must hold one more entry than rewards");
  }
  AdvantageEstimate out;
  out.advantages.assign(rewards.size(), 0.0);
  out.returns.assign(rewards.size(), 0.0);
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    const double delta = rewards[t] + gamma * values[t + 1] - values[t];
    running = delta + gamma * lambda * running;
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
  }
  return out;
}

void attach_advantages(RolloutBuffer& buffer, double gamma, double lambda) {
  std::vector<double> values = buffer.values;
  values.push_back(buffer.bootstrap_value);
  auto est = compute_gae(buffer.rewards, values, gamma, lambda);
  buffer.advantages = std::move(est.advantages);
  buffer.returns = std::move(est.returns);
}

RolloutBuffer collect_gail_rollout(const nn::GaussianHead<float>& model,
                                   const nn::Mlp<float>& critic,
                                   const nn::Mlp<float>& discriminator,
                                   const Controller& controller,
                                   std::span<const float> first_window, std::size_t horizon,
                                   const NormSpec& norm, std::mt19937_64& rng,
                                   bool deterministic) {
  if (horizon == 0) throw ConfigError("rollout horizon must be positive");
  const auto dim = static_cast<Eigen::Index>(first_window.size());
  if (dim != static_cast<Eigen::Index>(model.mean.input_dim()) || dim % 2 != 0) {
    throw ConfigError("rollout window does not match the model input");
  }
  RolloutBuffer buf;
  buf.windows.resize(dim, static_cast<Eigen::Index>(horizon));
  Eigen::VectorXf window = Eigen::Map<const Eigen::VectorXf>(first_window.data(), dim);
  Eigen::VectorXf disc_input(dim + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double log_std = model.log_std;
  const double stddev = std::exp(log_std);

  for (std::size_t t = 0; t < horizon; ++t) {
    buf.windows.col(static_cast<Eigen::Index>(t)) = window;
    const double mean = model.mean.forward(window)(0);
    const double drawn = deterministic ? mean : mean + stddev * gauss(rng);
    const float sample = static_cast<float>(drawn);
    const float clipped = clip_unit(sample);

    disc_input.head(dim) = window;
    disc_input(dim) = clipped;
    const double score = discriminator.forward(disc_input)(0);
    const double reward = gail_reward(score);

    buf.samples.push_back(sample);
    buf.log_probs.push_back(
        nn::gaussian_log_prob<double>(static_cast<double>(sample), mean, log_std));
    buf.values.push_back(critic.forward(window)(0));
    buf.rewards.push_back(reward);

    Action action;
    try {
      action = controller.decide(State{denormalize(clipped, norm.state)});
    } catch (const std::exception& e) {
      throw ConfigError(std::string("controller failed during GAIL rollout: ") + e.what());
    }
    window.head(dim - 2) = window.tail(dim - 2).eval();
    window(dim - 2) = clipped;
    window(dim - 1) = static_cast<float>(normalize(action.value, norm.action));
  }
  buf.bootstrap_value = critic.forward(window)(0);
  return buf;
}

double clipped_surrogate(std::span<const double> ratios, std::span<const double> advantages,
                         double clip_epsilon) {
  if (ratios.size() != advantages.size() || ratios.empty()) {
    throw ConfigError("clipped_surrogate: size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double clipped = std::clamp(ratios[i], 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    total += std::min(ratios[i] * advantages[i], clipped * advantages[i]);
  }
  return total / static_cast<double>(ratios.size());
}

PpoOptimizers make_ppo_optimizers(const Networks& nets, const GailHyper& hyper) {
  return {nn::AdamState<float>(nets.model.mean.parameter_count(), {hyper.model_lr}),
          nn::AdamState<float>(1, {hyper.log_std_lr}),
          nn::AdamState<float>(nets.critic.parameter_count(), {hyper.critic_lr})};
}

PpoStats ppo_update(nn::GaussianHead<float>& model, nn::Mlp<float>& critic,
                    const RolloutBuffer& buffer, const GailHyper& hyper,
                    PpoOptimizers& optimizers) {
  if (!buffer.has_advantages()) throw ConfigError("ppo_update: advantages not computed");
  const std::size_t n = buffer.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> adv = buffer.advantages;
  if (n >= 2) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) * inv_n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double std = std::sqrt(var / static_cast<double>(n - 1));
    for (double& a : adv) a = (a - mean) / (std + 1e-8);
  }

  PpoStats stats;
  std::vector<double> ratios(n);
  Matrix mean_grad(1, static_cast<Eigen::Index>(n));
  Matrix value_grad(1, static_cast<Eigen::Index>(n));
  for (std::size_t it = 0; it < hyper.ppo_policy_iters; ++it) {
    // Policy.
    const auto trace = model.mean.forward_trace(buffer.windows);
    const double log_std = model.log_std;
    const double var = std::exp(2.0 * log_std);
    bool overflow = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = trace.output()(0, static_cast<Eigen::Index>(i));
      const double log_ratio =
          nn::gaussian_log_prob<double>(buffer.samples[i], mu, log_std) - buffer.log_probs[i];
      if (!(std::abs(log_ratio) <= kMaxLogRatio)) {
        overflow = true;
        break;
      }
      ratios[i] = std::exp(log_ratio);
    }
    if (overflow) {
      ++stats.skipped_steps;
    } else {
      stats.policy_loss = -clipped_surrogate(ratios, adv, hyper.clip_epsilon);
      require_finite(stats.policy_loss, "PPO policy loss");
      double log_std_grad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = ratios[i];
        const bool inside = r >= 1.0 - hyper.clip_epsilon && r <= 1.0 + hyper.clip_epsilon;
        const bool unclipped_min = r * adv[i] <= std::clamp(r, 1.0 - hyper.clip_epsilon,
                                                            1.0 + hyper.clip_epsilon) * adv[i];
        // d(loss)/d(log prob) for the active branch of the min.
        const double g = (inside || unclipped_min) ? -adv[i] * r * inv_n : 0.0;
        const double diff = buffer.samples[i] - trace.output()(0, static_cast<Eigen::Index>(i));
        mean_grad(0, static_cast<Eigen::Index>(i)) = static_cast<float>(g * diff / var);
        log_std_grad += g * (diff * diff / var - 1.0);
      }
      const auto grads = model.mean.backward(trace, mean_grad);
      const float ls_grad = static_cast<float>(log_std_grad);
      nn::adam_step<float>(model.mean, grads, optimizers.model);
      nn::adam_step<float>(std::span<float>(&model.log_std, 1),
                           std::span<const float>(&ls_grad, 1), optimizers.log_std);
    }

    // Critic.
    const auto vtrace = critic.forward_trace(buffer.windows);
    double value_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = vtrace.output()(0, static_cast<Eigen::Index>(i)) - buffer.returns[i];
      value_loss += diff * diff;
      value_grad(0, static_cast<Eigen::Index>(i)) = static_cast<float>(2.0 * diff * inv_n);
    }
    stats.value_loss = value_loss * inv_n;
    require_finite(stats.value_loss, "critic loss");
    nn::adam_step<float>(critic, critic.backward(vtrace, value_grad), optimizers.critic);
  }
  return stats;
}

namespace {

struct Checkpoint {
  Networks nets;
};

TrainedModel run_adversarial(Networks nets, const ControllerLookup& controllers,
                             const Dataset& data, const GailHyper& hyper, std::uint64_t seed,
                             UpdateTerms terms, Algorithm algorithm) {
  hyper.validate();
  const nn::FlushDenormals ftz;
  if (data.samples.empty()) throw ConfigError("training needs a non-empty dataset");
  if (nets.model.mean.input_dim() != data.feature_dim() ||
      nets.critic.input_dim() != data.feature_dim() ||
      nets.discriminator.input_dim() != data.feature_dim() + 1) {
    throw ConfigError("network input dimensions do not match dataset windows");
  }
  const auto groups = make_group_batches(data);
  nn::AdamState<float> disc_opt(nets.discriminator.parameter_count(), {hyper.disc_lr});
  PpoOptimizers ppo_opt = make_ppo_optimizers(nets, hyper);
  nn::AdamState<float> bc_opt(nets.model.mean.parameter_count(), {hyper.model_lr});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  TrainedModel out;
  out.stochastic = terms.gail;
  out.norm = data.norm;
  out.history_length = data.history_length;
  out.provenance = {algorithm, data.source_logs, seed, hyper.epochs};
  Checkpoint last_good{nets};

  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double bc_sum = 0.0, gail_sum = 0.0, disc_sum = 0.0, reward_sum = 0.0;
    std::size_t bc_count = 0, gail_count = 0, reward_count = 0;
    try {
      for (const auto& group : groups) {
        const Eigen::Index n = group.inputs.cols();
        if (terms.gail) {
          // Discriminator: real next states vs one-step model samples on the
          // same windows.
          const Matrix mean = nets.model.mean.forward(group.inputs);
          if (!terms.bc) {
            bc_sum += (mean - group.targets).cast<double>().squaredNorm();
            bc_count += static_cast<std::size_t>(n);
          }
          Matrix fake(1, n);
          const double stddev = nets.model.stddev();
          for (Eigen::Index c = 0; c < n; ++c) {
            fake(0, c) = clip_unit(static_cast<float>(mean(0, c) + stddev * gauss(rng)));
          }
          disc_sum += discriminator_update(nets.discriminator, disc_opt,
                                           stack(group.inputs, group.targets),
                                           stack(group.inputs, fake), hyper.ppo_disc_iters);
          ++out.trace.discriminator_updates;

          if (n >= 2) {
            const Eigen::VectorXf first = group.inputs.col(0);
            RolloutBuffer buffer = collect_gail_rollout(
                nets.model, nets.critic, nets.discriminator, controllers(group.controller_x),
                std::span<const float>(first.data(), static_cast<std::size_t>(first.size())),
                static_cast<std::size_t>(n - 1), data.norm, rng);
            for (double r : buffer.rewards) reward_sum += r;
            reward_count += buffer.size();
            attach_advantages(buffer, hyper.gamma, hyper.lambda);
            const PpoStats stats = ppo_update(nets.model, nets.critic, buffer, hyper, ppo_opt);
            out.trace.skipped_ppo_steps += stats.skipped_steps;
            gail_sum += stats.policy_loss;
            ++gail_count;
          }
        }
        if (terms.bc) {
          bc_sum += bc_step(nets.model.mean, bc_opt, group) * static_cast<double>(n);
          bc_count += static_cast<std::size_t>(n);
        }
        if (!nets.model.mean.all_finite() || !std::isfinite(nets.model.log_std) ||
            !nets.critic.all_finite() || !nets.discriminator.all_finite()) {
          throw NumericalError("non-finite network parameters");
        }
      }
      EpochRecord record;
      record.epoch = epoch;
      if (bc_count > 0) record.loss_bc = bc_sum / static_cast<double>(bc_count);
      if (terms.gail) {
        record.loss_disc = disc_sum / static_cast<double>(groups.size());
        if (gail_count > 0) record.loss_gail = gail_sum / static_cast<double>(gail_count);
        if (reward_count > 0) record.mean_reward = reward_sum / static_cast<double>(reward_count);
        if (reward_count > 0 && !std::isfinite(record.mean_reward)) {
          throw NumericalError("mean rollout reward is not finite");
        }
      }
      out.trace.epochs.push_back(record);
      last_good.nets = nets;
    } catch (const NumericalError& e) {
      out.trace.aborted = true;
      out.trace.abort_reason = "epoch " + std::to_string(epoch) + ": " + e.what();
      nets = std::move(last_good.nets);
      break;
    }
  }
  if (terms.gail) out.trace.reward_converged = reward_trend_non_decreasing(out.trace.epochs);
  out.head = std::move(nets.model);
  return out;
}

ControllerLookup single(const Controller& controller) {
  return [&controller](double) -> const Controller& { return controller; };
}

}  // namespace

TrainedModel train_gail(Networks nets, const ControllerLookup& controllers,
                        const Dataset& data, const GailHyper& hyper, std::uint64_t seed) {
  return run_adversarial(std::move(nets), controllers, data, hyper, seed, {true, false},
                         Algorithm::kGail);
}

TrainedModel train_gail(Networks nets, const Controller& controller, const Dataset& data,
                        const GailHyper& hyper, std::uint64_t seed) {
  return train_gail(std::move(nets), single(controller), data, hyper, seed);
}

TrainedModel train_bcxgail(Networks nets, const ControllerLookup& controllers,
                           const Dataset& data, const GailHyper& hyper, std::uint64_t seed,
                           UpdateTerms terms) {
  if (!terms.gail && !terms.bc) throw ConfigError("BCxGAIL needs at least one update term");
  return run_adversarial(std::move(nets), controllers, data, hyper, seed, terms,
                         Algorithm::kBcxGail);
}

TrainedModel train_bcxgail(Networks nets, const Controller& controller, const Dataset& data,
                           const GailHyper& hyper, std::uint64_t seed, UpdateTerms terms) {
  return train_bcxgail(std::move(nets), single(controller), data, hyper, seed, terms);
}

bool reward_trend_non_decreasing(std::span<const EpochRecord> epochs, std::size_t window,
                                 std::size_t tail) {
  if (window == 0 || epochs.size() < window) return false;
  std::vector<double> averages;
  double sum = 0.0;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const double r = epochs[i].mean_reward;
    if (std::isnan(r)) return false;
    sum += r;
    if (i >= window) sum -= epochs[i - window].mean_reward;
    if (i + 1 >= window) averages.push_back(sum / static_cast<double>(window));
  }
  const std::size_t span = std::min(tail, averages.size());
  for (std::size_t i = averages.size() - span + 1; i < averages.size(); ++i) {
    if (averages[i] < averages[i - 1]) return false;
  }
  return true;
}

}  // namespace envi::il
