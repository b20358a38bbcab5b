#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>

#include "rte/transport_system.hpp"

namespace rte {

//! Consistent diffusion correction operator.
//!
//! Built by taking discrete moments of the transport discretization itself
//! under the closure df = drho + 3 (vx dJx + vy dJy): with the per-axis
//! upwind/downwind streaming matrices D+ and D- combined into the central
//! part D_C = (D+ + D-)/2 and the (negative semidefinite) jump part
//! D_J = D+ - D-, the zeroth and first angular moments of the correction
//! equation form a sparse coupled system in (drho, dJ[, dJy]).  All angular
//! moment coefficients are computed numerically from the quadrature, so the
//! operator stays consistent with whatever rule the transport system uses.
//! Boundary faces keep their edge terms in D_J / D_C (vacuum exterior), which
//! also fixes the 2D corner behaviour without special cases.
//!
//! The current unknowns are eliminated only implicitly: the coupled sparse
//! system is factored once (direct solve) and the density block of the
//! solution is returned, which is algebraically the same density as the
//! current-eliminated equation.  apply_eliminated() exposes the eliminated
//! operator itself for verification.
class DsaOperator {
 public:
  explicit DsaOperator(const TransportSystem& system);
  ~DsaOperator();
  DsaOperator(DsaOperator&&) noexcept;
  DsaOperator& operator=(DsaOperator&&) noexcept;

  //! delta_rho -> C * Sigma_s * delta_rho (the synthetic correction).
  Eigen::VectorXd correct(const Eigen::VectorXd& delta_rho) const;

  //! rhs -> C * rhs: solves the coupled moment system with density-equation
  //! right-hand side rhs (no scattering pre-multiplication).
  Eigen::VectorXd solve_density(const Eigen::VectorXd& rhs) const;

  //! Applies the current-eliminated density operator
  //!   S x = A_rr x - A_rJ T^{-1} A_Jr x
  //! (factorizations of the current blocks are built lazily on first use).
  Eigen::VectorXd apply_eliminated(const Eigen::VectorXd& x) const;

  long coupled_dim() const;

  //! "row col value" triplets of the coupled moment matrix, one per line.
  void dump_triplets(std::ostream& os) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DsaOperator build_dsa(const TransportSystem& system);

}  // namespace rte
