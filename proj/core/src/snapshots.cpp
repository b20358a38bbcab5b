#include "rte/snapshots.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>

namespace rte {

namespace {

constexpr char kMagic[8] = {'R', 'T', 'E', 'S', 'N', 'P', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::FILE* f;
  void raw(const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n)
      throw std::runtime_error("snapshots: write failed");
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
};

struct Reader {
  std::FILE* f;
  void raw(void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n)
      throw std::runtime_error("snapshots: truncated file");
  }
  std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
};

struct Header {
  int geometry;
  long n_v, n_dof;
  Params mu;
  int window;
  double eps_train;
  int dsize;  // bytes per kinetic scalar: 8 (double) or 4 (float)
  int w_mu, n_conv;
  bool converged;
};

long header_bytes(int n_params) { return 58 + 8L * n_params; }
long patch_offset(int n_params) { return 49 + 8L * n_params; }

Header read_header(std::FILE* f, const std::string& path) {
  Reader in{f};
  char magic[8];
  in.raw(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("snapshots: " + path + " is not a snapshot file");
  if (in.u32() != kVersion)
    throw std::runtime_error("snapshots: unsupported version in " + path);
  Header h;
  h.geometry = static_cast<int>(in.u32());
  h.n_v = static_cast<long>(in.u64());
  h.n_dof = static_cast<long>(in.u64());
  const int np = static_cast<int>(in.u32());
  h.mu.resize(np);
  for (int k = 0; k < np; ++k) h.mu[k] = in.f64();
  h.window = static_cast<int>(in.u32());
  h.eps_train = in.f64();
  h.dsize = in.u8();
  h.w_mu = static_cast<int>(in.u32());
  h.n_conv = static_cast<int>(in.u32());
  h.converged = in.u8() != 0;
  return h;
}

SnapshotInfo to_info(const Header& h, const std::string& path) {
  SnapshotInfo info;
  info.mu = h.mu;
  info.window = h.window;
  info.w_mu = h.w_mu;
  info.n_conv = h.n_conv;
  info.converged = h.converged;
  info.eps_train = h.eps_train;
  info.path = path;
  return info;
}

void write_kinetic(Writer& out, const double* f, long n, int dsize) {
  if (dsize == 8) {
    out.raw(f, static_cast<size_t>(n) * 8);
  } else {
    std::vector<float> buf(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) buf[static_cast<size_t>(i)] = static_cast<float>(f[i]);
    out.raw(buf.data(), buf.size() * 4);
  }
}

void read_kinetic(std::FILE* f, long offset, long n, int dsize, double* out) {
  if (std::fseek(f, offset, SEEK_SET) != 0)
    throw std::runtime_error("snapshots: seek failed");
  if (dsize == 8) {
    if (std::fread(out, 8, static_cast<size_t>(n), f) != static_cast<size_t>(n))
      throw std::runtime_error("snapshots: truncated file");
  } else {
    std::vector<float> buf(static_cast<size_t>(n));
    if (std::fread(buf.data(), 4, buf.size(), f) != buf.size())
      throw std::runtime_error("snapshots: truncated file");
    for (long i = 0; i < n; ++i) out[i] = buf[static_cast<size_t>(i)];
  }
}

}  // namespace

SnapshotInfo collect_snapshots(const TransportSystem& system,
                               const DsaOperator& dsa,
                               const TrainingConfig& config,
                               const std::string& path) {
  const auto t0 = std::chrono::steady_clock::now();
  const long n = system.n_dof();
  const long kdim = system.kinetic_dim();
  const int dsize = config.float32 ? 4 : 8;
  const Params& mu = system.mu();

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("snapshots: cannot create " + path);
  Writer out{fp};
  out.raw(kMagic, 8);
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(system.quad().geometry));
  out.u64(static_cast<std::uint64_t>(system.quad().n()));
  out.u64(static_cast<std::uint64_t>(n));
  out.u32(static_cast<std::uint32_t>(mu.size()));
  for (double p : mu) out.f64(p);
  out.u32(static_cast<std::uint32_t>(config.window));
  out.f64(config.eps_train);
  out.u8(static_cast<std::uint8_t>(dsize));
  out.u32(0);  // w_mu, patched below
  out.u32(0);  // n_conv, patched below
  out.u8(0);   // converged, patched below

  Eigen::VectorXd rho_prev = Eigen::VectorXd::Zero(n);
  std::vector<double> f(static_cast<size_t>(kdim));
  SweepCounter sc;
  int w_mu = 0;
  long l = 0;
  bool converged = false;
  while (l < config.max_iters) {
    ++l;
    system.kinetic_sweep(rho_prev, f.data(), &sc);
    Eigen::VectorXd rho_star = system.density_of(f.data());
    Eigen::VectorXd drho = rho_star - rho_prev;
    if (l <= config.window) {
      write_kinetic(out, f.data(), kdim, dsize);
      out.raw(drho.data(), static_cast<size_t>(n) * 8);
      w_mu = static_cast<int>(l);
    }
    if (drho.lpNorm<Eigen::Infinity>() < config.eps_train) {
      converged = true;
      break;
    }
    rho_prev = rho_star + dsa.correct(drho);
  }
  write_kinetic(out, f.data(), kdim, dsize);

  if (std::fseek(fp, patch_offset(static_cast<int>(mu.size())), SEEK_SET) != 0)
    throw std::runtime_error("snapshots: seek failed");
  out.u32(static_cast<std::uint32_t>(w_mu));
  out.u32(static_cast<std::uint32_t>(l));
  out.u8(converged ? 1 : 0);
  std::fclose(fp);

  if (!converged) {
    std::fprintf(stderr,
                 "warning: training solve did not converge in %ld iterations "
                 "(%s); parameter excluded from the snapshot set\n",
                 config.max_iters, path.c_str());
  }

  SnapshotInfo info;
  info.mu = mu;
  info.window = config.window;
  info.w_mu = w_mu;
  info.n_conv = static_cast<int>(l);
  info.converged = converged;
  info.eps_train = config.eps_train;
  info.seconds = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0).count();
  info.path = path;
  return info;
}

SnapshotInfo read_snapshot_header(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("snapshots: cannot open " + path);
  Header h = read_header(f, path);
  std::fclose(f);
  return to_info(h, path);
}

namespace {

struct FileGeometry {
  long data_start;   // byte offset of the first stored iterate
  long f_bytes;      // bytes of one kinetic vector
  long record_bytes; // kinetic vector + density change
  int dsize;
};

FileGeometry file_geometry(const Header& h) {
  FileGeometry g;
  g.dsize = h.dsize;
  g.f_bytes = h.n_v * h.n_dof * h.dsize;
  g.record_bytes = g.f_bytes + h.n_dof * 8;
  g.data_start = header_bytes(static_cast<int>(h.mu.size()));
  return g;
}

}  // namespace

SnapshotStore SnapshotStore::open(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".snap") paths.push_back(entry.path().string());
  }
  if (paths.empty())
    throw std::runtime_error("snapshots: no .snap files in " + dir);
  std::sort(paths.begin(), paths.end());

  SnapshotStore store;
  for (const auto& p : paths) {
    std::FILE* f = std::fopen(p.c_str(), "rb");
    if (!f) throw std::runtime_error("snapshots: cannot open " + p);
    Header h = read_header(f, p);
    std::fclose(f);
    if (store.infos_.empty()) {
      store.geometry_ = h.geometry;
      store.n_v_ = h.n_v;
      store.n_dof_ = h.n_dof;
    } else if (h.geometry != store.geometry_ || h.n_v != store.n_v_ ||
               h.n_dof != store.n_dof_) {
      throw std::runtime_error(
          "snapshots: mixed discretizations in one store (" + p + ")");
    }
    store.infos_.push_back(to_info(h, p));
    store.f32_.push_back(h.dsize == 4);
  }
  return store;
}

namespace {

Header store_header(const SnapshotStore& s, int i) {
  const SnapshotInfo& info = s.info(i);
  Header h;
  h.geometry = s.geometry();
  h.n_v = s.n_v();
  h.n_dof = s.n_dof();
  h.mu = info.mu;
  h.window = info.window;
  h.eps_train = info.eps_train;
  h.dsize = 8;  // patched by caller when the file is single precision
  h.w_mu = info.w_mu;
  h.n_conv = info.n_conv;
  h.converged = info.converged;
  return h;
}

}  // namespace

void SnapshotStore::converged_f(int i, double* out) const {
  Header h = store_header(*this, i);
  h.dsize = f32_[static_cast<size_t>(i)] ? 4 : 8;
  FileGeometry g = file_geometry(h);
  std::FILE* f = std::fopen(infos_[static_cast<size_t>(i)].path.c_str(), "rb");
  if (!f) throw std::runtime_error("snapshots: cannot open " + infos_[i].path);
  read_kinetic(f, g.data_start + h.w_mu * g.record_bytes, n_v_ * n_dof_,
               g.dsize, out);
  std::fclose(f);
}

void SnapshotStore::intermediate_f(int i, int l, double* out) const {
  const SnapshotInfo& info = infos_[static_cast<size_t>(i)];
  if (l < 1 || l > info.w_mu)
    throw std::out_of_range("snapshots: iterate index out of range");
  Header h = store_header(*this, i);
  h.dsize = f32_[static_cast<size_t>(i)] ? 4 : 8;
  FileGeometry g = file_geometry(h);
  std::FILE* f = std::fopen(info.path.c_str(), "rb");
  if (!f) throw std::runtime_error("snapshots: cannot open " + info.path);
  read_kinetic(f, g.data_start + (l - 1) * g.record_bytes, n_v_ * n_dof_,
               g.dsize, out);
  std::fclose(f);
}

Eigen::VectorXd SnapshotStore::delta_rho(int i, int l) const {
  const SnapshotInfo& info = infos_[static_cast<size_t>(i)];
  if (l < 1 || l > info.w_mu)
    throw std::out_of_range("snapshots: iterate index out of range");
  Header h = store_header(*this, i);
  h.dsize = f32_[static_cast<size_t>(i)] ? 4 : 8;
  FileGeometry g = file_geometry(h);
  Eigen::VectorXd out(n_dof_);
  std::FILE* f = std::fopen(info.path.c_str(), "rb");
  if (!f) throw std::runtime_error("snapshots: cannot open " + info.path);
  read_kinetic(f, g.data_start + (l - 1) * g.record_bytes + g.f_bytes, n_dof_,
               8, out.data());
  std::fclose(f);
  return out;
}

int SnapshotStore::primary_cols() const {
  int n = 0;
  for (const auto& info : infos_) n += info.converged ? 1 : 0;
  return n;
}

int SnapshotStore::correction_cols(int window_limit) const {
  int n = 0;
  for (const auto& info : infos_)
    n += info.converged ? std::min(info.w_mu, window_limit) : 0;
  return n;
}

namespace {

class PrimarySource : public ColumnSource {
 public:
  explicit PrimarySource(const SnapshotStore& s) : s_(&s) {
    for (int i = 0; i < s.n_mu(); ++i)
      if (s.info(i).converged) idx_.push_back(i);
  }
  long rows() const override { return s_->kinetic_dim(); }
  int cols() const override { return static_cast<int>(idx_.size()); }
  void column(int j, double* out) const override {
    s_->converged_f(idx_[static_cast<size_t>(j)], out);
  }

 private:
  const SnapshotStore* s_;
  std::vector<int> idx_;
};

class CorrectionSource : public ColumnSource {
 public:
  CorrectionSource(const SnapshotStore& s, int window_limit) : s_(&s) {
    for (int i = 0; i < s.n_mu(); ++i) {
      if (!s.info(i).converged) continue;
      const int w = std::min(s.info(i).w_mu, window_limit);
      for (int l = 1; l <= w; ++l) map_.push_back({i, l});
    }
  }
  long rows() const override { return s_->kinetic_dim(); }
  int cols() const override { return static_cast<int>(map_.size()); }
  void column(int j, double* out) const override {
    const auto [i, l] = map_[static_cast<size_t>(j)];
    if (i != cached_i_) {
      cached_.resize(static_cast<size_t>(s_->kinetic_dim()));
      s_->converged_f(i, cached_.data());
      cached_i_ = i;
    }
    s_->intermediate_f(i, l, out);
    const long n = s_->kinetic_dim();
    for (long k = 0; k < n; ++k) out[k] = cached_[static_cast<size_t>(k)] - out[k];
  }

 private:
  const SnapshotStore* s_;
  std::vector<std::pair<int, int>> map_;
  mutable std::vector<double> cached_;
  mutable int cached_i_ = -1;
};

}  // namespace

std::unique_ptr<ColumnSource> SnapshotStore::primary_source() const {
  return std::make_unique<PrimarySource>(*this);
}

std::unique_ptr<ColumnSource> SnapshotStore::correction_source(
    int window_limit) const {
  return std::make_unique<CorrectionSource>(*this, window_limit);
}

}  // namespace rte
