#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "rte/dsa.hpp"
#include "rte/transport_system.hpp"

namespace rte {

struct SolveConfig {
  double eps_sisa = 1e-11;  // absolute tolerance on ||rho*(l) - rho(l-1)||_inf
  int max_iters = 2000;     // outer iterations (SI) / total inner iterations (GMRES)
  int gmres_restart = 25;
  double gmres_rel_tol = 1e-11;  // preconditioned relative residual
  std::optional<Eigen::VectorXd> initial_guess;  // absent = zero
};

struct SolveReport {
  bool converged = false;
  long n_sweep = 0;
  int iterations = 0;                  // outer (SI) or total inner (GMRES)
  std::vector<double> change_history;  // SI: ||rho*(l)-rho(l-1)||_inf per l;
                                       // GMRES: relative residual per step
  double final_residual = 0;           // ||(I-L)rho - bbar||_inf
  double wall_seconds = 0;
  std::string strategy;       // "SI", "DSA", "ROMSA-3", ..., "PGMRES"
  std::string initial_guess;  // "zero" | "supplied"
  std::string correction_log;  // one letter per correction: D(SA), R(OMSA),
                               // S(ingular fallback)
};

//! Pluggable correction used after each source-iteration step: given the
//! iteration index l and the change delta = rho^(l,*) - rho^(l-1), returns
//! the additive correction applied to rho^(l,*).
class CorrectionStrategy {
 public:
  virtual ~CorrectionStrategy() = default;

  //! Per-parameter setup hook, called once before the first iteration.
  virtual void setup(const TransportSystem& system) { (void)system; }

  virtual Eigen::VectorXd correct(int l, const Eigen::VectorXd& delta) = 0;

  //! Which branch produced the last correction (for the correction log).
  virtual char last_kind() const = 0;

  virtual std::string label() const = 0;
};

//! The baseline synthetic acceleration: delta_rho = C Sigma_s delta.
class DsaStrategy : public CorrectionStrategy {
 public:
  explicit DsaStrategy(const DsaOperator& op) : op_(&op) {}
  Eigen::VectorXd correct(int, const Eigen::VectorXd& delta) override {
    return op_->correct(delta);
  }
  char last_kind() const override { return 'D'; }
  std::string label() const override { return "DSA"; }

 private:
  const DsaOperator* op_;
};

//! Source iteration with optional synthetic acceleration.  The convergence
//! check on ||rho^(l,*) - rho^(l-1)||_inf happens before the correction is
//! applied, and the converged answer is rho^(l,*) itself.
std::pair<Eigen::VectorXd, SolveReport> sisa_solve(const TransportSystem& system,
                                                   CorrectionStrategy* strategy,
                                                   const SolveConfig& config);

//! Restarted GMRES on (I - L) rho = bbar, left-preconditioned with
//! P = I + C Sigma_s when a DSA operator is supplied.  Stops on the
//! preconditioned relative residual; the Givens-rotation estimate is
//! verified against a true residual before reporting convergence (that
//! verification is also the restart residual, so overhead stays at three
//! sweeps: rhs assembly, initial residual, final verification).
std::pair<Eigen::VectorXd, SolveReport> gmres_solve(const TransportSystem& system,
                                                    const DsaOperator* preconditioner,
                                                    const SolveConfig& config);

//! ||(I - L) rho - bbar||_inf; diagnostic, excluded from sweep accounting.
double residual_inf(const TransportSystem& system, const Eigen::VectorXd& rho);

}  // namespace rte
