#include "hgrec/gradcheck.hpp"

#include <cmath>
#include <vector>

namespace hgrec {

GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<Parameter* const> params, double eps) {
  for (Parameter* p : params) p->zero_grad();
  const double base = loss();
  if (!std::isfinite(base)) throw NumericsError("grad_check: non-finite base loss");

  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.push_back(p->grad);

  GradCheckReport rep;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Parameter* p = params[pi];
    for (int k = 0; k < p->value.size(); ++k) {
      const double saved = p->value.v[k];
      p->value.v[k] = saved + eps;
      p->zero_grad();
      const double lp = loss();
      p->value.v[k] = saved - eps;
      p->zero_grad();
      const double lm = loss();
      p->value.v[k] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm))
        throw NumericsError("grad_check: non-finite perturbed loss");
      const double numeric = (lp - lm) / (2.0 * eps);
      const double a = analytic[pi].v[k];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(a - numeric) / denom;
      ++rep.coords_checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = static_cast<int>(pi);
        rep.worst_coord = k;
        rep.worst_analytic = a;
        rep.worst_numeric = numeric;
      }
    }
    p->zero_grad();
  }
  // leave the analytic gradients in place for callers that want them
  for (size_t pi = 0; pi < params.size(); ++pi) params[pi]->grad = analytic[pi];
  return rep;
}

}  // namespace hgrec
