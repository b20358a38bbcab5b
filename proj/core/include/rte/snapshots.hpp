#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "rte/dsa.hpp"
#include "rte/pod.hpp"
#include "rte/transport_system.hpp"

namespace rte {

//! Offline training controls for one parameter value.
struct TrainingConfig {
  int window = 3;           //! intermediate iterates kept per parameter (w)
  double eps_train = 1e-11; //! SI-DSA stopping tolerance during training
  long max_iters = 2000;
  //! Store kinetic data in single precision (halves disk for very large
  //! training sets, e.g. 121-sample 2D grids).  Off by default; tolerances
  //! below ~1e-7 need the default double-precision store.
  bool float32 = false;
};

//! What one training solve produced.  n_conv counts SI-DSA iterations
//! (one transport sweep each); w_mu = min(n_conv, window) iterates were
//! stored along with the converged solution.
struct SnapshotInfo {
  Params mu;
  int window = 0;
  int w_mu = 0;
  int n_conv = 0;
  bool converged = false;
  double eps_train = 0;
  double seconds = 0;
  std::string path;
};

//! Run SI-DSA on the full kinetic formulation for the system's parameter
//! value and write a snapshot file at `path`: the first w_mu intermediate
//! kinetic iterates f^(l) with their density changes, then the converged
//! kinetic solution.  A non-converged run is still written (flagged) but
//! later excluded from training.  Independent parameter values can be
//! collected concurrently; each call touches only its own file.
SnapshotInfo collect_snapshots(const TransportSystem& system,
                               const DsaOperator& dsa,
                               const TrainingConfig& config,
                               const std::string& path);

//! A directory of per-parameter snapshot files.  Exposes the two training
//! matrices as column streams:
//!   - primary: converged kinetic solutions f^mu, one column per parameter;
//!   - correction: difference snapshots f^mu - f^(l), derived on the fly
//!     from the stored iterates -- the kinetic correction equation is never
//!     solved during training.
//! Non-converged parameters are dropped from both streams (with a warning
//! at collection time).
class SnapshotStore {
 public:
  static SnapshotStore open(const std::string& dir);

  int n_mu() const { return static_cast<int>(infos_.size()); }
  const SnapshotInfo& info(int i) const { return infos_[i]; }
  const std::vector<SnapshotInfo>& infos() const { return infos_; }

  int geometry() const { return geometry_; }
  long n_v() const { return n_v_; }
  long n_dof() const { return n_dof_; }
  long kinetic_dim() const { return n_v_ * n_dof_; }

  void converged_f(int i, double* out) const;
  //! l is 1-based: the l-th source iterate, 1 <= l <= info(i).w_mu.
  void intermediate_f(int i, int l, double* out) const;
  Eigen::VectorXd delta_rho(int i, int l) const;

  int primary_cols() const;
  //! Columns available when only iterates l <= window_limit are used; a
  //! store collected with window w serves any model with window <= w.
  int correction_cols(int window_limit = 1 << 30) const;
  std::unique_ptr<ColumnSource> primary_source() const;
  std::unique_ptr<ColumnSource> correction_source(
      int window_limit = 1 << 30) const;

 private:
  std::vector<SnapshotInfo> infos_;
  int geometry_ = 0;
  long n_v_ = 0;
  long n_dof_ = 0;
  std::vector<bool> f32_;
};

//! Parse one snapshot file header (exposed for format tests).
SnapshotInfo read_snapshot_header(const std::string& path);

}  // namespace rte
