#pragma once

#include <cstdint>

#include "envi/core/dataset.hpp"
#include "envi/il/networks.hpp"
#include "envi/il/trained_model.hpp"
#include "envi/nn/adam.hpp"

namespace envi::il {

// One Adam step on the mean squared error of `mean` over `group`.
// Returns the loss measured before the update.
double bc_step(nn::Mlp<float>& mean, nn::AdamState<float>& optimizer, const GroupBatch& group);

// Behavior cloning: each epoch visits every source log in dataset order and
// takes one full-batch MSE step on its samples. The result is deterministic
// (mean output); `seed` is recorded as provenance.
TrainedModel train_bc(nn::GaussianHead<float> model, const Dataset& data,
                      const BcHyper& hyper, std::uint64_t seed);

}  // namespace envi::il
