#include <chrono>
#include <cmath>

#include "rte/solvers.hpp"

namespace rte {

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}
}  // namespace

std::pair<Eigen::VectorXd, SolveReport> gmres_solve(const TransportSystem& system,
                                                    const DsaOperator* preconditioner,
                                                    const SolveConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const long n = system.n_dof();
  const int m = config.gmres_restart;

  SolveReport rep;
  rep.strategy = preconditioner ? "PGMRES" : "GMRES";
  rep.initial_guess = config.initial_guess ? "supplied" : "zero";

  SweepCounter sc;
  const Eigen::VectorXd bbar = system.assemble_rhs(&sc);

  const auto apply_A = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x - system.apply_L(x, &sc);
  };
  const auto apply_P = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (!preconditioner) return x;
    return x + preconditioner->solve_density(system.apply_Ms(x));
  };

  const Eigen::VectorXd pb = apply_P(bbar);
  double bnorm = pb.norm();
  if (bnorm == 0) bnorm = 1.0;

  Eigen::VectorXd rho =
      config.initial_guess ? *config.initial_guess : Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd v(n, m + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd g(m + 1), cs(m), sn(m);

  int total_inner = 0;

  while (true) {
    // Residual of the current iterate.  This also serves as the true-residual
    // verification of the previous cycle's Givens estimate, so convergence is
    // never declared from the estimate alone.
    const Eigen::VectorXd a_rho = apply_A(rho);
    const Eigen::VectorXd r = apply_P(bbar - a_rho);
    const double beta = r.norm();
    const double rel0 = beta / bnorm;
    rep.change_history.push_back(rel0);
    if (rel0 <= config.gmres_rel_tol) {
      rep.converged = true;
      rep.final_residual = (a_rho - bbar).lpNorm<Eigen::Infinity>();
      break;
    }
    if (total_inner >= config.max_iters) break;

    v.col(0) = r / beta;
    g.setZero();
    g[0] = beta;

    int cols = 0;
    for (int j = 0; j < m && total_inner < config.max_iters; ++j) {
      ++total_inner;
      Eigen::VectorXd w = apply_P(apply_A(v.col(j)));
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v.col(i));
        w.noalias() -= h(i, j) * v.col(i);
      }
      h(j + 1, j) = w.norm();
      const bool breakdown = h(j + 1, j) <= 1e-300;
      if (!breakdown) v.col(j + 1) = w / h(j + 1, j);

      // Apply the accumulated Givens rotations to the new column, then
      // create the rotation that annihilates the subdiagonal entry.
      for (int i = 0; i < j; ++i) {
        const double tmp = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = tmp;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = denom == 0 ? 1.0 : h(j, j) / denom;
      sn[j] = denom == 0 ? 0.0 : h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      cols = j + 1;
      const double rel = std::abs(g[j + 1]) / bnorm;
      rep.change_history.push_back(rel);
      if (rel <= config.gmres_rel_tol || breakdown) break;
    }

    if (cols > 0) {
      // Minimize over the Krylov space built so far: back-substitute R y = g.
      Eigen::VectorXd y(cols);
      for (int i = cols - 1; i >= 0; --i) {
        double s = g[i];
        for (int k = i + 1; k < cols; ++k) s -= h(i, k) * y[k];
        y[i] = s / h(i, i);
      }
      rho.noalias() += v.leftCols(cols) * y;
    }
  }

  rep.iterations = total_inner;
  rep.n_sweep = sc.sweeps;
  if (!rep.converged) {
    rep.final_residual =
        (rho - system.apply_L(rho, nullptr) - bbar).lpNorm<Eigen::Infinity>();
  }
  rep.wall_seconds = seconds_since(t0);
  return {std::move(rho), std::move(rep)};
}

}  // namespace rte
