#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <memory>
#include <string>

namespace rte {

//! Column-streaming view of a (possibly huge) dense matrix.  POD and the
//! reduced-model builder consume matrices through this interface so kinetic
//! snapshot matrices never need to fit in memory.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;
  virtual long rows() const = 0;
  virtual int cols() const = 0;
  virtual void column(int j, double* out) const = 0;
};

//! Column-major raw binary matrix file (rows*cols doubles, no header).
class FileColumnSource : public ColumnSource {
 public:
  FileColumnSource(std::string path, long rows, int cols);
  ~FileColumnSource() override;
  long rows() const override { return rows_; }
  int cols() const override { return cols_; }
  void column(int j, double* out) const override;
  void columns(int j0, int k, double* out) const;  // k contiguous columns
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  long rows_;
  int cols_;
  mutable std::FILE* f_;
};

class DenseColumnSource : public ColumnSource {
 public:
  explicit DenseColumnSource(const Eigen::MatrixXd& a) : a_(&a) {}
  long rows() const override { return a_->rows(); }
  int cols() const override { return static_cast<int>(a_->cols()); }
  void column(int j, double* out) const override {
    Eigen::VectorXd::Map(out, a_->rows()) = a_->col(j);
  }

 private:
  const Eigen::MatrixXd* a_;
};

struct PodOptions {
  double eps_pod = 1e-9;
  long memory_budget = 3L * 1024 * 1024 * 1024;  // bytes of scratch RAM
  std::string scratch_dir = ".";   // out-of-core staging area
  std::string basis_path;          // output file for U_r (required)
};

struct PodResult {
  int rank = 0;
  long rows = 0;
  Eigen::VectorXd singular_values;  // all of them, descending
  std::string basis_path;           // column-major rows x rank doubles
  double seconds = 0;
};

//! Proper orthogonal decomposition with truncation: r is the smallest l such
//! that (sum_{k<=l} sigma_k) / (sum_k sigma_k) >= 1 - eps_pod, computed on
//! singular values (not their squares).  Modes below 1e-14 * sigma_1 are
//! treated as exact zeros.  The left singular vectors are obtained from a
//! Householder QR-based factorization (in-core divide-and-conquer SVD when
//! the matrix fits the memory budget, blocked tall-skinny QR with disk
//! staging otherwise), so small singular values stay accurate near machine
//! precision in absolute terms -- which the tight truncation tolerances
//! (down to 1e-11) require.
PodResult pod_truncate(const ColumnSource& src, const PodOptions& opt);

//! In-memory convenience variant for small matrices and tests.
struct DensePod {
  int rank = 0;
  Eigen::MatrixXd u;  // rows x rank
  Eigen::VectorXd singular_values;
};
DensePod pod_truncate(const Eigen::MatrixXd& a, double eps_pod);

//! The truncation rule alone (exposed for tests).
int truncation_rank(const Eigen::VectorXd& singular_values, double eps_pod);

}  // namespace rte
