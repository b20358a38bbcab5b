#include "rte/pod.hpp"

#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace rte {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void check_lapack(lapack_int info, const char* what) {
  if (info != 0) {
    throw std::runtime_error(std::string("pod: ") + what + " failed (info=" +
                             std::to_string(info) + ")");
  }
}

std::FILE* open_or_throw(const std::string& path, const char* mode) {
  std::FILE* f = std::fopen(path.c_str(), mode);
  if (!f) throw std::runtime_error("pod: cannot open " + path);
  return f;
}

void seek_to(std::FILE* f, long element_offset) {
  if (std::fseek(f, element_offset * static_cast<long>(sizeof(double)),
                 SEEK_SET) != 0) {
    throw std::runtime_error("pod: seek failed");
  }
}

void read_doubles(std::FILE* f, double* buf, long n) {
  if (std::fread(buf, sizeof(double), static_cast<size_t>(n), f) !=
      static_cast<size_t>(n)) {
    throw std::runtime_error("pod: short read");
  }
}

void write_doubles(std::FILE* f, const double* buf, long n) {
  if (std::fwrite(buf, sizeof(double), static_cast<size_t>(n), f) !=
      static_cast<size_t>(n)) {
    throw std::runtime_error("pod: short write");
  }
}

// Column-major block I/O on a rows x cols matrix file.
void read_rows_block(std::FILE* f, long rows, int cols, long row0, long nrows,
                     double* buf) {
  for (int c = 0; c < cols; ++c) {
    seek_to(f, static_cast<long>(c) * rows + row0);
    read_doubles(f, buf + static_cast<long>(c) * nrows, nrows);
  }
}

void write_rows_block(std::FILE* f, long rows, int cols, long row0, long nrows,
                      const double* buf) {
  for (int c = 0; c < cols; ++c) {
    seek_to(f, static_cast<long>(c) * rows + row0);
    write_doubles(f, buf + static_cast<long>(c) * nrows, nrows);
  }
}

struct Svd {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd w;  // left vectors of the small matrix handed to dgesdd
};

// Economy SVD of a column-major matrix held in `a` (destroyed); left vectors
// returned in w (m x min(m,n)).
Svd dgesdd_econ(Eigen::MatrixXd& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.sigma.resize(k);
  out.w.resize(m, k);
  Eigen::MatrixXd vt(k, n);
  check_lapack(
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m,
                     out.sigma.data(), out.w.data(), m, vt.data(), k),
      "dgesdd");
  return out;
}

}  // namespace

FileColumnSource::FileColumnSource(std::string path, long rows, int cols)
    : path_(std::move(path)), rows_(rows), cols_(cols), f_(nullptr) {
  f_ = open_or_throw(path_, "rb");
}

FileColumnSource::~FileColumnSource() {
  if (f_) std::fclose(f_);
}

void FileColumnSource::column(int j, double* out) const {
  seek_to(f_, static_cast<long>(j) * rows_);
  read_doubles(f_, out, rows_);
}

void FileColumnSource::columns(int j0, int k, double* out) const {
  seek_to(f_, static_cast<long>(j0) * rows_);
  read_doubles(f_, out, static_cast<long>(k) * rows_);
}

int truncation_rank(const Eigen::VectorXd& singular_values, double eps_pod) {
  const long n = singular_values.size();
  if (n == 0 || !(singular_values[0] > 0)) {
    throw std::invalid_argument("pod: snapshot matrix is zero");
  }
  const double guard = 1e-14 * singular_values[0];
  long kept = 0;
  double total = 0;
  for (long k = 0; k < n; ++k) {
    if (singular_values[k] >= guard) {
      total += singular_values[k];
      kept = k + 1;
    } else {
      break;  // descending order: everything after is noise/zero
    }
  }
  double partial = 0;
  for (long l = 0; l < kept; ++l) {
    partial += singular_values[l];
    if (partial / total >= 1.0 - eps_pod) return static_cast<int>(l + 1);
  }
  return static_cast<int>(kept);
}

DensePod pod_truncate(const Eigen::MatrixXd& a, double eps_pod) {
  if (a.size() == 0) throw std::invalid_argument("pod: empty snapshot matrix");
  Eigen::MatrixXd work = a;
  Svd svd = dgesdd_econ(work);
  DensePod out;
  out.rank = truncation_rank(svd.sigma, eps_pod);
  out.u = svd.w.leftCols(out.rank);
  out.singular_values = svd.sigma;
  return out;
}

namespace {

PodResult pod_in_core(const ColumnSource& src, const PodOptions& opt) {
  const long m = src.rows();
  const int n = src.cols();
  Eigen::MatrixXd a(m, n);
  for (int j = 0; j < n; ++j) src.column(j, a.col(j).data());
  Svd svd = dgesdd_econ(a);
  a.resize(0, 0);

  PodResult out;
  out.rank = truncation_rank(svd.sigma, opt.eps_pod);
  out.rows = m;
  out.singular_values = svd.sigma;
  out.basis_path = opt.basis_path;
  std::FILE* f = open_or_throw(opt.basis_path, "wb");
  write_doubles(f, svd.w.data(), m * static_cast<long>(out.rank));
  std::fclose(f);
  return out;
}

PodResult pod_tsqr(const ColumnSource& src, const PodOptions& opt) {
  namespace fs = std::filesystem;
  const long m = src.rows();
  const int n = src.cols();

  // Row-block size: two blocks of n columns each must fit the budget.
  long block_rows = opt.memory_budget / 2 / (8L * n);
  block_rows = std::min(block_rows, m);
  if (block_rows < 2L * n) {
    throw std::runtime_error(
        "pod: memory budget too small for the out-of-core factorization");
  }
  int nblocks = static_cast<int>((m + block_rows - 1) / block_rows);
  block_rows = (m + nblocks - 1) / nblocks;  // balance the blocks
  // A short trailing block must still have >= n rows for its QR.
  if (m - block_rows * (nblocks - 1) < n && nblocks > 1) --nblocks;

  const std::string stage_path =
      (fs::path(opt.scratch_dir) / "pod_stage.bin").string();
  {
    std::FILE* f = open_or_throw(stage_path, "wb");
    Eigen::VectorXd col(m);
    for (int j = 0; j < n; ++j) {
      src.column(j, col.data());
      write_doubles(f, col.data(), m);
    }
    std::fclose(f);
  }

  // Stage 1: independent QR of each row block; reflectors are written back
  // in place, the triangular factors are stacked.
  std::FILE* stage = open_or_throw(stage_path, "r+b");
  Eigen::MatrixXd r_stack(static_cast<long>(nblocks) * n, n);
  std::vector<Eigen::VectorXd> taus(nblocks);
  {
    Eigen::MatrixXd block;
    for (int i = 0; i < nblocks; ++i) {
      const long r0 = static_cast<long>(i) * block_rows;
      const long br = std::min(block_rows, m - r0);
      block.resize(br, n);
      read_rows_block(stage, m, n, r0, br, block.data());
      taus[i].resize(n);
      check_lapack(LAPACKE_dgeqrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(br),
                                  n, block.data(),
                                  static_cast<lapack_int>(br), taus[i].data()),
                   "dgeqrf(block)");
      r_stack.middleRows(static_cast<long>(i) * n, n) =
          block.topRows(n).triangularView<Eigen::Upper>();
      write_rows_block(stage, m, n, r0, br, block.data());
    }
  }

  // Stage 2: QR of the stacked triangles, made explicit.
  Eigen::VectorXd tau2(n);
  check_lapack(
      LAPACKE_dgeqrf(LAPACK_COL_MAJOR,
                     static_cast<lapack_int>(r_stack.rows()), n,
                     r_stack.data(), static_cast<lapack_int>(r_stack.rows()),
                     tau2.data()),
      "dgeqrf(stack)");
  Eigen::MatrixXd r2 = r_stack.topRows(n).triangularView<Eigen::Upper>();
  check_lapack(
      LAPACKE_dorgqr(LAPACK_COL_MAJOR,
                     static_cast<lapack_int>(r_stack.rows()), n, n,
                     r_stack.data(), static_cast<lapack_int>(r_stack.rows()),
                     tau2.data()),
      "dorgqr(stack)");

  // Stage 3: SVD of the final triangle; truncation.
  Svd svd = dgesdd_econ(r2);
  PodResult out;
  out.rank = truncation_rank(svd.sigma, opt.eps_pod);
  out.rows = m;
  out.singular_values = svd.sigma;
  out.basis_path = opt.basis_path;
  const int r = out.rank;

  // Stage 4: left vectors, block by block:
  //   U_i = Q_i * (Q2_i * W_r)   via the stored block reflectors.
  {
    std::FILE* fu = open_or_throw(opt.basis_path, "wb");
    Eigen::MatrixXd block, c;
    for (int i = 0; i < nblocks; ++i) {
      const long r0 = static_cast<long>(i) * block_rows;
      const long br = std::min(block_rows, m - r0);
      block.resize(br, n);
      read_rows_block(stage, m, n, r0, br, block.data());
      c = Eigen::MatrixXd::Zero(br, r);
      c.topRows(n) = r_stack.middleRows(static_cast<long>(i) * n, n) *
                     svd.w.leftCols(r);
      check_lapack(
          LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'N',
                         static_cast<lapack_int>(br), r, n, block.data(),
                         static_cast<lapack_int>(br), taus[i].data(), c.data(),
                         static_cast<lapack_int>(br)),
          "dormqr(block)");
      write_rows_block(fu, m, r, r0, br, c.data());
    }
    std::fclose(fu);
  }
  std::fclose(stage);
  fs::remove(stage_path);
  return out;
}

}  // namespace

PodResult pod_truncate(const ColumnSource& src, const PodOptions& opt) {
  const auto t0 = now_seconds();
  const long m = src.rows();
  const int n = src.cols();
  if (m <= 0 || n <= 0) throw std::invalid_argument("pod: empty snapshot matrix");
  if (opt.basis_path.empty()) {
    throw std::invalid_argument("pod: basis output path not set");
  }

  // In-core estimate: snapshot copy + left vectors + divide-and-conquer work.
  const double in_core_bytes =
      8.0 * m * n * 2.2 + 8.0 * static_cast<double>(n) * n * 6 + (1 << 24);
  PodResult out;
  if (in_core_bytes <= static_cast<double>(opt.memory_budget) || m < 2L * n) {
    if (in_core_bytes > static_cast<double>(opt.memory_budget)) {
      throw std::runtime_error(
          "pod: wide snapshot matrix exceeds the memory budget");
    }
    out = pod_in_core(src, opt);
  } else {
    out = pod_tsqr(src, opt);
  }
  out.seconds = now_seconds() - t0;
  return out;
}

}  // namespace rte
