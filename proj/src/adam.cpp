#include "hgrec/adam.hpp"

#include <cmath>

namespace hgrec {

void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg) {
  for (Parameter* p : params) {
    p->step += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
    for (int k = 0; k < p->value.size(); ++k) {
      const double g = p->grad.v[k];
      p->m.v[k] = cfg.beta1 * p->m.v[k] + (1.0 - cfg.beta1) * g;
      p->s.v[k] = cfg.beta2 * p->s.v[k] + (1.0 - cfg.beta2) * g * g;
      const double mhat = p->m.v[k] / c1;
      const double shat = p->s.v[k] / c2;
      p->value.v[k] -= cfg.lr * mhat / (std::sqrt(shat) + cfg.eps);
    }
    p->zero_grad();
  }
}

}  // namespace hgrec
