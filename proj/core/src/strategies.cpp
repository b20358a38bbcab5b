#include "rte/strategies.hpp"

#include <algorithm>
#include <stdexcept>

namespace rte {

Eigen::VectorXd romig(const ReducedModel& model, const TransportSystem& system) {
  const Eigen::MatrixXd a = model.assemble(system);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw std::runtime_error(
        "reduced initial guess: reduced operator is singular at this "
        "parameter value; loosen the truncation tolerance or enrich the "
        "training set");
  }
  const Eigen::VectorXd c = lu.solve(model.b_r);
  // Galerkin residual orthogonality, as a backward-error bound.
  const double resid = (model.b_r - a * c).lpNorm<Eigen::Infinity>();
  const double scale = a.cwiseAbs().rowwise().sum().maxCoeff() *
                           c.lpNorm<Eigen::Infinity>() +
                       model.b_r.lpNorm<Eigen::Infinity>();
  if (resid > 1e-10 * std::max(scale, 1e-300)) {
    throw std::runtime_error(
        "reduced initial guess: Galerkin residual check failed");
  }
  return model.u_rho * c;
}

double romsad_tolerance(double eps_train, double eps_pod, double eta) {
  return eta * std::max(eps_train, eps_pod);
}

RomsaStrategy::RomsaStrategy(const ReducedModel& model, std::string label)
    : model_(&model), label_(std::move(label)) {}

void RomsaStrategy::setup(const TransportSystem& system) {
  system_ = &system;
  lu_.compute(model_->assemble(system));
  singular_ = !lu_.isInvertible();
  kind_ = 'R';
}

Eigen::VectorXd RomsaStrategy::correct(int, const Eigen::VectorXd& delta) {
  if (singular_) {
    kind_ = 'S';
    return Eigen::VectorXd::Zero(delta.size());
  }
  kind_ = 'R';
  const Eigen::VectorXd rhs =
      model_->u_iso.transpose() * system_->apply_Ms(delta);
  return model_->u_rho * lu_.solve(rhs);
}

RomsadStrategy::RomsadStrategy(const ReducedModel& model,
                               const DsaOperator& dsa, int theta,
                               double eps_romsad, std::string label)
    : romsa_(model), dsa_(dsa), theta_(theta), eps_romsad_(eps_romsad),
      label_(std::move(label)) {}

void RomsadStrategy::setup(const TransportSystem& system) {
  romsa_.setup(system);
  switched_ = romsa_.singular();
  kind_ = switched_ ? 'D' : 'R';
}

Eigen::VectorXd RomsadStrategy::correct(int l, const Eigen::VectorXd& delta) {
  if (!switched_ && l <= theta_ &&
      delta.lpNorm<Eigen::Infinity>() >= eps_romsad_) {
    kind_ = 'R';
    return romsa_.correct(l, delta);
  }
  switched_ = true;
  kind_ = 'D';
  return dsa_.correct(l, delta);
}

}  // namespace rte
