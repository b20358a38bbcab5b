#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "rte/dg_space.hpp"
#include "rte/mesh.hpp"
#include "rte/problem.hpp"
#include "rte/quadrature.hpp"

namespace rte {

//! Tally of transport sweeps.  A sweep is one application of
//! (D_j + Sigma_t)^{-1} for every direction j, i.e. one pass over the full
//! kinetic unknown.  Solvers report this as their primary cost metric.
struct SweepCounter {
  long sweeps = 0;
};

//! Discrete-ordinates transport operator for one parameter value:
//!
//!   (D_j + Sigma_t) f_j = Sigma_s rho + G + g_j^bc,   rho = sum_j w_j f_j
//!
//! discretized with upwind DG (bilinear, orthonormal basis).  Exposes both
//! the density-space fixed-point map rho -> L rho + bbar used by the
//! iterative solvers (memory: one density vector) and kinetic-space
//! operator applications used by the reduced models and test oracles.
class TransportSystem {
 public:
  TransportSystem(const ProblemDefinition& problem, const Mesh& mesh,
                  const DgSpace& space, const AngularQuadrature& quad,
                  const Params& mu);

  const Mesh& mesh() const { return mesh_; }
  const DgSpace& space() const { return space_; }
  const AngularQuadrature& quad() const { return quad_; }
  const ProblemDefinition& problem() const { return problem_; }
  const Params& mu() const { return mu_; }

  int n_terms() const { return static_cast<int>(psi_.size()); }
  double psi(int k) const { return psi_[k]; }

  long n_dof() const { return space_.n_dof; }
  long kinetic_dim() const { return static_cast<long>(quad_.n()) * space_.n_dof; }

  // --- density-space operations ------------------------------------------
  Eigen::VectorXd apply_Ms(const Eigen::VectorXd& rho) const;
  Eigen::VectorXd apply_Mt(const Eigen::VectorXd& rho) const;

  //! (D_j + Sigma_t)^{-1} rhs with zero inflow (boundary data lives in rhs).
  Eigen::VectorXd sweep_direction(int j, const Eigen::VectorXd& rhs) const;

  //! (D_j + Sigma_t) f for a single direction block (adjoint of nothing --
  //! the forward operator, used by oracles and the reduced models).
  void apply_streaming_collision(int j, const Eigen::VectorXd& f,
                                 Eigen::VectorXd& out) const;

  //! L rho = sum_j w_j (D_j + Sigma_t)^{-1} Sigma_s rho (one sweep).
  Eigen::VectorXd apply_L(const Eigen::VectorXd& rho, SweepCounter* counter) const;

  //! bbar = sum_j w_j (D_j + Sigma_t)^{-1} (G + g_j^bc) (one sweep).
  Eigen::VectorXd assemble_rhs(SweepCounter* counter) const;

  //! Dense g_j^bc (inflow face integrals) for one direction.
  Eigen::VectorXd boundary_source(int j) const;

  //! Load vector of the isotropic volumetric source G.
  const Eigen::VectorXd& volumetric_source() const { return g_vec_; }

  // --- kinetic-space operations -------------------------------------------
  //! rho = sum_j w_j f_j for a stacked kinetic vector (direction-major).
  Eigen::VectorXd density_of(const double* f) const;

  //! out = A_k u for one affine operator term (term 0 carries streaming).
  void apply_term_kinetic(int k, const double* u, double* out) const;

  //! out = A_mu u = sum_k psi_k(mu) A_k u.
  void apply_kinetic(const double* u, double* out) const;

  //! Stacked kinetic right-hand side b: block j is G + g_j^bc.
  Eigen::VectorXd kinetic_rhs() const;

  //! One transport solve over all directions with the scattering source
  //! frozen at rho: f_j = (D_j+Sigma_t)^{-1}(Sigma_s rho + G + g_j^bc).
  //! Writes all direction blocks of f (kinetic_dim doubles); one sweep.
  void kinetic_sweep(const Eigen::VectorXd& rho, double* f,
                     SweepCounter* counter) const;

  // --- oracle / debugging helpers ------------------------------------------
  //! Dense A_mu; only sensible for tiny systems.
  Eigen::MatrixXd materialize_kinetic() const;
  //! "row col value" triplets of A_mu, one per line.
  void dump_triplets(std::ostream& os) const;

  //! Per-cell blocks of the scattering / total-collision mass operators.
  const Eigen::MatrixXd& Ms_block(int cell) const { return ms_cells_[cell]; }
  const Eigen::MatrixXd& Mt_block(int cell) const { return mt_cells_[cell]; }

 private:
  struct BoundaryContrib {
    int cell;
    std::array<double, 4> vals;  // only the first n_local entries are used
  };

  void build_masses();
  void build_boundary_sources();
  void build_sweep_cache();
  void sweep_into(int j, const double* rhs, double* f) const;
  void add_boundary(int j, Eigen::VectorXd& rhs) const;

  ProblemDefinition problem_;
  Mesh mesh_;
  DgSpace space_;
  AngularQuadrature quad_;
  Params mu_;
  std::vector<double> psi_;

  // Per-term per-cell weighted mass blocks (n_local x n_local).
  // term_mass_t_ uses weight (absorption + scattering); term_mass_s_ uses
  // the scattering weight alone.
  std::vector<std::vector<Eigen::MatrixXd>> term_mass_t_;
  std::vector<std::vector<Eigen::MatrixXd>> term_mass_s_;
  std::vector<Eigen::MatrixXd> mt_cells_;  // sum_k psi_k * term_mass_t_[k]
  std::vector<Eigen::MatrixXd> ms_cells_;

  Eigen::VectorXd g_vec_;
  std::vector<std::vector<BoundaryContrib>> bc_;  // per direction

  // Cached factorizations of the per-cell blocks of (D_j + Sigma_t).
  // Directions sharing (vx, vy) -- the +/-vz pairs of the product
  // quadrature -- share one cache slot, since vz does not enter the
  // xy-plane operator.
  std::vector<int> dir_slot_;
  std::vector<std::vector<double>> inv_blocks_;  // slot -> cell-major flattened inverses

  // 1D basis traces per cell: value of (p0, p1) at the left/right cell edge.
  std::vector<std::array<double, 2>> tr_left_, tr_right_;
  // 2D uniform-mesh traces per axis.
  std::array<double, 2> bxL_{}, bxR_{}, byL_{}, byR_{};
};

}  // namespace rte
