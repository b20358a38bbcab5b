#pragma once

#include <string>

#include "rte/reduced_model.hpp"
#include "rte/solvers.hpp"

namespace rte {

//! Reduced-order initial guess: solve the r x r Galerkin system
//! (sum_k psi_k(mu) a_r[k]) c = b_r at the system's parameter value and
//! lift the density, rho_0 = u_rho * c.  Throws if the reduced matrix is
//! singular (remedy: loosen the truncation tolerance or enrich training).
Eigen::VectorXd romig(const ReducedModel& model, const TransportSystem& system);

//! Switching tolerance for the hybrid strategy:
//! eta * max(eps_train, eps_pod), with eta = 0.1 by default.
double romsad_tolerance(double eps_train, double eps_pod, double eta = 0.1);

//! Reduced-order synthetic acceleration.  setup() assembles and factors the
//! r x r reduced operator once per parameter value; each correction then
//! costs two thin-matrix products and one dense triangular solve.  A
//! singular reduced matrix degrades to a zero correction (logged 'S'), so
//! the outer iteration continues as plain source iteration.
class RomsaStrategy : public CorrectionStrategy {
 public:
  explicit RomsaStrategy(const ReducedModel& model,
                         std::string label = "ROMSA");
  void setup(const TransportSystem& system) override;
  Eigen::VectorXd correct(int l, const Eigen::VectorXd& delta) override;
  char last_kind() const override { return kind_; }
  std::string label() const override { return label_; }
  bool singular() const { return singular_; }

 private:
  const ReducedModel* model_;
  std::string label_;
  const TransportSystem* system_ = nullptr;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
  bool singular_ = false;
  char kind_ = 'R';
};

//! Hybrid correction: ROMSA while the iteration is young (l <= theta) and
//! the change is still large (||delta||_inf >= eps_romsad), DSA afterwards.
//! The switch is monotone -- once DSA takes over it keeps the remaining
//! iterations -- and a singular reduced matrix switches immediately.
//! The DSA operator passed in must belong to the same parameter value the
//! solver is set up with.
class RomsadStrategy : public CorrectionStrategy {
 public:
  RomsadStrategy(const ReducedModel& model, const DsaOperator& dsa, int theta,
                 double eps_romsad, std::string label = "ROMSAD");
  void setup(const TransportSystem& system) override;
  Eigen::VectorXd correct(int l, const Eigen::VectorXd& delta) override;
  char last_kind() const override { return kind_; }
  std::string label() const override { return label_; }

 private:
  RomsaStrategy romsa_;
  DsaStrategy dsa_;
  int theta_;
  double eps_romsad_;
  bool switched_ = false;
  char kind_ = 'R';
  std::string label_;
};

}  // namespace rte
