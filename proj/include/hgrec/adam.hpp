#pragma once

#include <span>

#include "hgrec/autograd.hpp"

namespace hgrec {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update over populated gradients; zeroes the gradients
// once applied.
void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg);

}  // namespace hgrec
