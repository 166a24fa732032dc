#pragma once

#include <functional>
#include <span>

#include "hgrec/autograd.hpp"

namespace hgrec {

struct GradCheckReport {
  double max_rel_err = 0.0;
  int worst_param = -1;
  int worst_coord = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int coords_checked = 0;
};

// Compares analytic gradients against central finite differences.
//
// `loss` must rebuild a fresh tape, run backward, and return the loss value;
// it has to be deterministic (same parameter values give the same loss).
// Every coordinate of every parameter is checked. Relative error per
// coordinate is |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<Parameter* const> params, double eps);

}  // namespace hgrec
