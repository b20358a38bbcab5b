#include "rte/problem.hpp"

namespace rte {

double ProblemDefinition::sigma_a(const Params& mu, double x, double y) const {
  double s = 0;
  for (const auto& t : terms) {
    if (!t.absorption_weight) continue;
    const double p = t.psi ? t.psi(mu) : 1.0;
    s += p * t.absorption_weight(x, y);
  }
  return s;
}

double ProblemDefinition::sigma_s(const Params& mu, double x, double y) const {
  double s = 0;
  for (const auto& t : terms) {
    if (!t.scattering_weight) continue;
    const double p = t.psi ? t.psi(mu) : 1.0;
    s += p * t.scattering_weight(x, y);
  }
  return s;
}

}  // namespace rte
