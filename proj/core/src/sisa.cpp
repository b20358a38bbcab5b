#include <chrono>

#include "rte/solvers.hpp"

namespace rte {

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}
}  // namespace

std::pair<Eigen::VectorXd, SolveReport> sisa_solve(const TransportSystem& system,
                                                   CorrectionStrategy* strategy,
                                                   const SolveConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.strategy = strategy ? strategy->label() : "SI";
  rep.initial_guess = config.initial_guess ? "supplied" : "zero";

  if (strategy) strategy->setup(system);

  SweepCounter sc;
  const Eigen::VectorXd bbar = system.assemble_rhs(&sc);
  Eigen::VectorXd rho = config.initial_guess
                            ? *config.initial_guess
                            : Eigen::VectorXd::Zero(system.n_dof());

  for (int l = 1; l <= config.max_iters; ++l) {
    Eigen::VectorXd rho_star = system.apply_L(rho, &sc) + bbar;
    const Eigen::VectorXd delta = rho_star - rho;
    const double change = delta.lpNorm<Eigen::Infinity>();
    rep.change_history.push_back(change);
    rep.iterations = l;
    if (change < config.eps_sisa) {
      rho = std::move(rho_star);
      rep.converged = true;
      break;
    }
    if (strategy) {
      rho = rho_star + strategy->correct(l, delta);
      rep.correction_log.push_back(strategy->last_kind());
    } else {
      rho = std::move(rho_star);
    }
  }

  rep.n_sweep = sc.sweeps;
  rep.final_residual = (rho - system.apply_L(rho, nullptr) - bbar)
                           .lpNorm<Eigen::Infinity>();
  rep.wall_seconds = seconds_since(t0);
  return {std::move(rho), std::move(rep)};
}

double residual_inf(const TransportSystem& system, const Eigen::VectorXd& rho) {
  const Eigen::VectorXd bbar = system.assemble_rhs(nullptr);
  return (rho - system.apply_L(rho, nullptr) - bbar).lpNorm<Eigen::Infinity>();
}

}  // namespace rte
