#include "rte/reduced_model.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace rte {

namespace {

constexpr char kMagic[8] = {'R', 'T', 'E', 'R', 'O', 'M', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

void wraw(std::FILE* f, const void* p, size_t n) {
  if (std::fwrite(p, 1, n, f) != n)
    throw std::runtime_error("reduced model: write failed");
}
void rraw(std::FILE* f, void* p, size_t n) {
  if (std::fread(p, 1, n, f) != n)
    throw std::runtime_error("reduced model: truncated file");
}
template <typename T>
void wscalar(std::FILE* f, T v) { wraw(f, &v, sizeof(T)); }
template <typename T>
T rscalar(std::FILE* f) { T v; rraw(f, &v, sizeof(T)); return v; }

}  // namespace

Eigen::MatrixXd ReducedModel::assemble(const TransportSystem& system) const {
  if (system.n_terms() != k_affine)
    throw std::invalid_argument(
        "reduced model: affine term count does not match the system");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rank, rank);
  for (int k = 0; k < k_affine; ++k) a += system.psi(k) * a_r[static_cast<size_t>(k)];
  return a;
}

void ReducedModel::save(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("reduced model: cannot create " + path);
  wraw(f, kMagic, 8);
  wscalar<std::uint32_t>(f, kVersion);
  wscalar<std::uint32_t>(f, static_cast<std::uint32_t>(geometry));
  wscalar<std::uint64_t>(f, static_cast<std::uint64_t>(n_v));
  wscalar<std::uint64_t>(f, static_cast<std::uint64_t>(n_dof));
  wscalar<std::uint32_t>(f, static_cast<std::uint32_t>(rank));
  wscalar<std::uint32_t>(f, static_cast<std::uint32_t>(k_affine));
  wscalar<std::uint8_t>(f, static_cast<std::uint8_t>(kind));
  wscalar<double>(f, eps_pod);
  wscalar<double>(f, eps_train);
  wscalar<double>(f, discarded_fraction);
  wscalar<double>(f, basis_seconds);
  wscalar<double>(f, operators_seconds);
  wraw(f, u_rho.data(), sizeof(double) * static_cast<size_t>(u_rho.size()));
  wraw(f, u_iso.data(), sizeof(double) * static_cast<size_t>(u_iso.size()));
  for (const auto& a : a_r)
    wraw(f, a.data(), sizeof(double) * static_cast<size_t>(a.size()));
  wraw(f, singular_values.data(),
       sizeof(double) * static_cast<size_t>(singular_values.size()));
  wraw(f, b_r.data(), sizeof(double) * static_cast<size_t>(b_r.size()));
  std::fclose(f);
}

ReducedModel ReducedModel::load(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("reduced model: cannot open " + path);
  char magic[8];
  rraw(f, magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("reduced model: " + path + " has wrong magic");
  if (rscalar<std::uint32_t>(f) != kVersion)
    throw std::runtime_error("reduced model: unsupported version in " + path);
  ReducedModel m;
  m.geometry = static_cast<int>(rscalar<std::uint32_t>(f));
  m.n_v = static_cast<long>(rscalar<std::uint64_t>(f));
  m.n_dof = static_cast<long>(rscalar<std::uint64_t>(f));
  m.rank = static_cast<int>(rscalar<std::uint32_t>(f));
  m.k_affine = static_cast<int>(rscalar<std::uint32_t>(f));
  m.kind = static_cast<char>(rscalar<std::uint8_t>(f));
  m.eps_pod = rscalar<double>(f);
  m.eps_train = rscalar<double>(f);
  m.discarded_fraction = rscalar<double>(f);
  m.basis_seconds = rscalar<double>(f);
  m.operators_seconds = rscalar<double>(f);
  m.u_rho.resize(m.n_dof, m.rank);
  rraw(f, m.u_rho.data(), sizeof(double) * static_cast<size_t>(m.u_rho.size()));
  m.u_iso.resize(m.n_dof, m.rank);
  rraw(f, m.u_iso.data(), sizeof(double) * static_cast<size_t>(m.u_iso.size()));
  m.a_r.resize(static_cast<size_t>(m.k_affine));
  for (auto& a : m.a_r) {
    a.resize(m.rank, m.rank);
    rraw(f, a.data(), sizeof(double) * static_cast<size_t>(a.size()));
  }
  m.singular_values.resize(m.rank);
  rraw(f, m.singular_values.data(),
       sizeof(double) * static_cast<size_t>(m.singular_values.size()));
  m.b_r.resize(m.rank);
  rraw(f, m.b_r.data(), sizeof(double) * static_cast<size_t>(m.b_r.size()));
  std::fclose(f);
  return m;
}

ReducedModel build_reduced_model(const TransportSystem& system,
                                 const ColumnSource& basis,
                                 const Eigen::VectorXd& all_singular_values,
                                 double eps_pod, double eps_train, char kind,
                                 double basis_seconds, long memory_budget) {
  const auto t0 = std::chrono::steady_clock::now();
  const long m = system.kinetic_dim();
  const long n = system.n_dof();
  const int n_v = system.quad().n();
  const int r = basis.cols();
  const int kk = system.n_terms();
  if (basis.rows() != m)
    throw std::invalid_argument("reduced model: basis rows != kinetic dimension");

  ReducedModel model;
  model.geometry = static_cast<int>(system.quad().geometry);
  model.n_v = n_v;
  model.n_dof = n;
  model.rank = r;
  model.k_affine = kk;
  model.kind = kind;
  model.eps_pod = eps_pod;
  model.eps_train = eps_train;
  model.basis_seconds = basis_seconds;
  model.u_rho = Eigen::MatrixXd::Zero(n, r);
  model.u_iso = Eigen::MatrixXd::Zero(n, r);
  model.a_r.assign(static_cast<size_t>(kk), Eigen::MatrixXd::Zero(r, r));
  model.b_r = Eigen::VectorXd::Zero(r);
  model.singular_values = all_singular_values.head(r);
  const double total = all_singular_values.sum();
  model.discarded_fraction =
      total > 0 ? all_singular_values.tail(all_singular_values.size() - r).sum() / total
                : 0.0;

  const Eigen::VectorXd b_kin = system.kinetic_rhs();

  int batch = static_cast<int>(std::min<long>(r, memory_budget / (3L * 8L * m)));
  batch = std::max(batch, 1);
  const int n_batches = (r + batch - 1) / batch;

  Eigen::MatrixXd ub(m, batch), y(m, batch), ub2;
  if (n_batches > 1) ub2.resize(m, batch);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(r, r);

  auto load_batch = [&](int b0, int cols, Eigen::MatrixXd& dst) {
    for (int c = 0; c < cols; ++c) basis.column(b0 + c, dst.col(c).data());
  };

  for (int jb = 0; jb < n_batches; ++jb) {
    const int j0 = jb * batch;
    const int jc = std::min(batch, r - j0);
    load_batch(j0, jc, ub);

    // Aggregated density maps and the reduced RHS, one pass over columns.
    for (int c = 0; c < jc; ++c) {
      for (int j = 0; j < n_v; ++j) {
        const auto block = ub.col(c).segment(static_cast<long>(j) * n, n);
        model.u_rho.col(j0 + c) += system.quad().weights[static_cast<size_t>(j)] * block;
        model.u_iso.col(j0 + c) += block;
      }
      model.b_r[j0 + c] = ub.col(c).dot(b_kin);
    }

    for (int k = 0; k < kk; ++k) {
      for (int c = 0; c < jc; ++c)
        system.apply_term_kinetic(k, ub.col(c).data(), y.col(c).data());
      for (int ib = 0; ib < n_batches; ++ib) {
        const int i0 = ib * batch;
        const int ic = std::min(batch, r - i0);
        const Eigen::MatrixXd* left = &ub;
        if (ib != jb) {
          load_batch(i0, ic, ub2);
          left = &ub2;
        }
        model.a_r[static_cast<size_t>(k)].block(i0, j0, ic, jc) =
            left->leftCols(ic).transpose() * y.leftCols(jc);
        if (k == 0)
          gram.block(i0, j0, ic, jc) =
              left->leftCols(ic).transpose() * ub.leftCols(jc);
      }
    }
  }

  const double ortho =
      (gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10)
    throw std::runtime_error(
        "reduced model: basis columns are not orthonormal (defect " +
        std::to_string(ortho) + ")");

  model.operators_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
  return model;
}

ReducedModel build_reduced_model(const TransportSystem& system,
                                 const PodResult& pod, double eps_pod,
                                 double eps_train, char kind,
                                 long memory_budget) {
  FileColumnSource basis(pod.basis_path, pod.rows, pod.rank);
  return build_reduced_model(system, basis, pod.singular_values, eps_pod,
                             eps_train, kind, pod.seconds, memory_budget);
}

}  // namespace rte
