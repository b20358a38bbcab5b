#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rte/pod.hpp"
#include "rte/transport_system.hpp"

namespace rte {

//! Galerkin reduced model of the kinetic operator on a POD basis U_r.
//!
//! Only parameter-independent projections are stored; the full basis is not
//! needed online.  For any mu, the r x r reduced operator is
//! sum_k psi_k(mu) * a_r[k], the reduced right-hand side is b_r, and density
//! fields are recovered through u_rho (quadrature-weighted basis sum) while
//! isotropic density sources enter through u_iso (plain basis sum).
struct ReducedModel {
  int geometry = 0;
  long n_v = 0;
  long n_dof = 0;
  int rank = 0;
  int k_affine = 0;
  char kind = 'p';  //! 'p' = parametric solution model, 'c' = correction model
  double eps_pod = 0;
  double eps_train = 0;

  Eigen::MatrixXd u_rho;               //! n_dof x r: sum_j w_j U_{r,j}
  Eigen::MatrixXd u_iso;               //! n_dof x r: sum_j U_{r,j}
  std::vector<Eigen::MatrixXd> a_r;    //! k_affine dense r x r projections
  Eigen::VectorXd singular_values;     //! the r retained values
  double discarded_fraction = 0;       //! (sum of dropped) / (sum of all)
  Eigen::VectorXd b_r;                 //! U_r^T (G + g^bc)

  double basis_seconds = 0;      //! offline cost of the truncated SVD
  double operators_seconds = 0;  //! offline cost of the Galerkin projections

  //! sum_k psi_k(mu) a_r[k] for the parameter value baked into `system`.
  Eigen::MatrixXd assemble(const TransportSystem& system) const;

  void save(const std::string& path) const;
  static ReducedModel load(const std::string& path);
};

//! Project the system's affine operator parts onto a basis streamed from
//! `basis` (columns = the r retained modes).  Matrix-free: each affine term
//! is applied to each basis column, then dotted against the basis in
//! batches sized to `memory_budget`.  Basis orthonormality is verified
//! (||U^T U - I||_max <= 1e-10) during the same pass; a violation throws.
ReducedModel build_reduced_model(const TransportSystem& system,
                                 const ColumnSource& basis,
                                 const Eigen::VectorXd& all_singular_values,
                                 double eps_pod, double eps_train, char kind,
                                 double basis_seconds,
                                 long memory_budget = 3L * 1024 * 1024 * 1024);

//! Convenience wrapper: basis file and metadata from a truncation result.
ReducedModel build_reduced_model(const TransportSystem& system,
                                 const PodResult& pod, double eps_pod,
                                 double eps_train, char kind,
                                 long memory_budget = 3L * 1024 * 1024 * 1024);

}  // namespace rte
