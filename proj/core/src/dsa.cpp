#include "rte/dsa.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace rte {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

// Per-cell 1D edge/derivative matrices (orthonormal basis, width h).
void edge_deriv(double h, Eigen::Matrix2d& er, Eigen::Matrix2d& el,
                Eigen::Matrix2d& s) {
  er << 1, kSqrt3, kSqrt3, 3;
  er /= h;
  el << 1, -kSqrt3, -kSqrt3, 3;
  el /= h;
  s.setZero();
  s(1, 0) = 2.0 * kSqrt3 / h;
}

// Streaming matrices for the positive / negative halves of one axis.
// axis = 0 (x) or 1 (y); in 1D only axis 0 exists.  The local index layout
// is a + 2b (x-mode fastest); in 1D the local size is 2.
void axis_streaming(const Mesh& mesh, const DgSpace& space, int axis,
                    SpMat& dp, SpMat& dm) {
  const long n = space.n_dof;
  std::vector<Trip> tp, tm;

  auto add_block = [&](std::vector<Trip>& t, int cell_r, int cell_c, int axis_,
                       const Eigen::Matrix2d& m) {
    // Lift the 2x2 axis operator onto the tensor basis: it acts on the
    // axis modes for each fixed transverse mode.
    const int nl = space.n_local;
    if (nl == 2) {
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          t.emplace_back(space.dof(cell_r, k), space.dof(cell_c, l), m(k, l));
      return;
    }
    for (int other = 0; other < 2; ++other) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          const int lr = axis_ == 0 ? k + 2 * other : other + 2 * k;
          const int lc = axis_ == 0 ? l + 2 * other : other + 2 * l;
          t.emplace_back(space.dof(cell_r, lr), space.dof(cell_c, lc), m(k, l));
        }
      }
    }
  };

  Eigen::Matrix2d er, el, s, cpl;

  if (mesh.geometry == Geometry::Slab1D) {
    const int nc = mesh.cell_count();
    for (int i = 0; i < nc; ++i) {
      const double h = mesh.width(i);
      edge_deriv(h, er, el, s);
      add_block(tp, i, i, 0, er - s);
      add_block(tm, i, i, 0, -el - s);
      if (i > 0) {
        // phi_k^i(left) * phi_l^{i-1}(right)
        const double si = 1.0 / std::sqrt(h), su = 1.0 / std::sqrt(mesh.width(i - 1));
        cpl << si * su, si * kSqrt3 * su, -kSqrt3 * si * su, -3 * si * su;
        add_block(tp, i, i - 1, 0, -cpl);
      }
      if (i < nc - 1) {
        // phi_k^i(right) * phi_l^{i+1}(left)
        const double si = 1.0 / std::sqrt(h), su = 1.0 / std::sqrt(mesh.width(i + 1));
        cpl << si * su, -si * kSqrt3 * su, kSqrt3 * si * su, -3 * si * su;
        add_block(tm, i, i + 1, 0, cpl);
      }
    }
  } else {
    const int nx = mesh.nx, ny = mesh.ny;
    const double h = axis == 0 ? mesh.hx() : mesh.hy();
    edge_deriv(h, er, el, s);
    Eigen::Matrix2d cl, cr;
    cl << 1, kSqrt3, -kSqrt3, -3;
    cl /= h;
    cr << 1, -kSqrt3, kSqrt3, -3;
    cr /= h;
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int cell = ix + nx * iy;
        add_block(tp, cell, cell, axis, er - s);
        add_block(tm, cell, cell, axis, -el - s);
        const int i_ax = axis == 0 ? ix : iy;
        const int n_ax = axis == 0 ? nx : ny;
        const int stride = axis == 0 ? 1 : nx;
        if (i_ax > 0) add_block(tp, cell, cell - stride, axis, -cl);
        if (i_ax < n_ax - 1) add_block(tm, cell, cell + stride, axis, cr);
      }
    }
  }

  dp.resize(n, n);
  dm.resize(n, n);
  dp.setFromTriplets(tp.begin(), tp.end());
  dm.setFromTriplets(tm.begin(), tm.end());
}

SpMat block_diag_mass(const TransportSystem& sys, bool absorption) {
  const DgSpace& space = sys.space();
  const int nl = space.n_local;
  std::vector<Trip> t;
  t.reserve(static_cast<std::size_t>(sys.mesh().cell_count()) * nl * nl);
  for (int c = 0; c < sys.mesh().cell_count(); ++c) {
    Eigen::MatrixXd m = absorption ? (sys.Mt_block(c) - sys.Ms_block(c)).eval()
                                   : sys.Mt_block(c);
    for (int k = 0; k < nl; ++k)
      for (int l = 0; l < nl; ++l)
        if (m(k, l) != 0) t.emplace_back(space.dof(c, k), space.dof(c, l), m(k, l));
  }
  SpMat out(space.n_dof, space.n_dof);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void append_block(std::vector<Trip>& t, const SpMat& m, long row0, long col0,
                  double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
    }
  }
}

}  // namespace

struct DsaOperator::Impl {
  const TransportSystem* sys = nullptr;
  int n_fields = 2;  // 1 + number of current components
  long n = 0;        // density DOFs

  SpMat coupled;
  Eigen::SparseLU<SpMat> lu;

  // Blocks kept for apply_eliminated: A_rr, A_rJ[i], A_Jr[i], T[i].
  SpMat a_rr;
  std::vector<SpMat> a_rj, a_jr, t_blocks;
  mutable std::vector<std::unique_ptr<Eigen::SparseLU<SpMat>>> t_lu;
};

DsaOperator::DsaOperator(const TransportSystem& system)
    : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.sys = &system;
  im.n = system.n_dof();
  const AngularQuadrature& q = system.quad();
  const bool slab = system.mesh().geometry == Geometry::Slab1D;
  im.n_fields = slab ? 2 : 3;

  SpMat ma = block_diag_mass(system, true);
  SpMat mt = block_diag_mass(system, false);

  // Angular moments taken with the same quadrature as the transport sweep.
  auto s1 = [&](auto comp) {
    double s = 0;
    for (int j = 0; j < q.n(); ++j)
      if (comp(j) > 0) s += q.weights[j] * comp(j);
    return s;
  };
  auto s2 = [&](auto comp) {
    double s = 0;
    for (int j = 0; j < q.n(); ++j) s += q.weights[j] * comp(j) * comp(j);
    return s;
  };
  auto s3 = [&](auto comp) {
    double s = 0;
    for (int j = 0; j < q.n(); ++j)
      if (comp(j) > 0) s += q.weights[j] * comp(j) * comp(j) * comp(j);
    return s;
  };
  // Mixed third moment: sum over the positive half of `pos` of w * sq^2 * pos.
  auto s3_mixed = [&](auto sq, auto pos) {
    double s = 0;
    for (int j = 0; j < q.n(); ++j)
      if (pos(j) > 0) s += q.weights[j] * sq(j) * sq(j) * pos(j);
    return s;
  };
  auto vx = [&](int j) { return q.vx(j); };
  auto vy = [&](int j) { return q.vy(j); };

  std::vector<Trip> trip;
  const long n = im.n;

  if (slab) {
    SpMat dp, dm;
    axis_streaming(system.mesh(), system.space(), 0, dp, dm);
    SpMat dj = dm - dp;
    SpMat dc = 0.5 * (dp + dm);
    const double m1 = s1(vx), m2 = s2(vx), m3 = s3(vx);

    im.a_rr = ma - m1 * dj;
    SpMat a01 = 3.0 * m2 * dc;
    SpMat a10 = m2 * dc;
    SpMat t11 = 3.0 * m2 * mt - 3.0 * m3 * dj;
    im.a_rj = {a01};
    im.a_jr = {a10};
    im.t_blocks = {t11};

    append_block(trip, im.a_rr, 0, 0);
    append_block(trip, a01, 0, n);
    append_block(trip, a10, n, 0);
    append_block(trip, t11, n, n);
  } else {
    SpMat dpx, dmx, dpy, dmy;
    axis_streaming(system.mesh(), system.space(), 0, dpx, dmx);
    axis_streaming(system.mesh(), system.space(), 1, dpy, dmy);
    SpMat djx = dmx - dpx, djy = dmy - dpy;
    SpMat dcx = 0.5 * (dpx + dmx), dcy = 0.5 * (dpy + dmy);

    const double m1x = s1(vx), m2x = s2(vx), m3x = s3(vx);
    const double m1y = s1(vy), m2y = s2(vy), m3y = s3(vy);
    const double m3yx = s3_mixed(vx, vy);  // sum_{vy>0} w vx^2 vy
    const double m3xy = s3_mixed(vy, vx);  // sum_{vx>0} w vy^2 vx

    im.a_rr = ma - m1x * djx - m1y * djy;
    SpMat a01 = 3.0 * m2x * dcx;
    SpMat a02 = 3.0 * m2y * dcy;
    SpMat a10 = m2x * dcx;
    SpMat a20 = m2y * dcy;
    SpMat tx = 3.0 * m2x * mt - 3.0 * m3x * djx - 3.0 * m3yx * djy;
    SpMat ty = 3.0 * m2y * mt - 3.0 * m3y * djy - 3.0 * m3xy * djx;
    im.a_rj = {a01, a02};
    im.a_jr = {a10, a20};
    im.t_blocks = {tx, ty};

    append_block(trip, im.a_rr, 0, 0);
    append_block(trip, a01, 0, n);
    append_block(trip, a02, 0, 2 * n);
    append_block(trip, a10, n, 0);
    append_block(trip, tx, n, n);
    append_block(trip, a20, 2 * n, 0);
    append_block(trip, ty, 2 * n, 2 * n);
  }

  const long dim = static_cast<long>(im.n_fields) * n;
  im.coupled.resize(dim, dim);
  im.coupled.setFromTriplets(trip.begin(), trip.end());
  im.coupled.makeCompressed();

  im.lu.compute(im.coupled);
  if (im.lu.info() != Eigen::Success) {
    throw std::runtime_error("dsa: coupled moment system factorization failed");
  }
  im.t_lu.resize(im.t_blocks.size());
}

DsaOperator::~DsaOperator() = default;
DsaOperator::DsaOperator(DsaOperator&&) noexcept = default;
DsaOperator& DsaOperator::operator=(DsaOperator&&) noexcept = default;

Eigen::VectorXd DsaOperator::solve_density(const Eigen::VectorXd& rhs) const {
  const Impl& im = *impl_;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(im.coupled.rows());
  full.head(im.n) = rhs;
  Eigen::VectorXd sol = im.lu.solve(full);
  if (im.lu.info() != Eigen::Success) {
    throw std::runtime_error("dsa: coupled moment system solve failed");
  }
  return sol.head(im.n);
}

Eigen::VectorXd DsaOperator::correct(const Eigen::VectorXd& delta_rho) const {
  return solve_density(impl_->sys->apply_Ms(delta_rho));
}

Eigen::VectorXd DsaOperator::apply_eliminated(const Eigen::VectorXd& x) const {
  const Impl& im = *impl_;
  Eigen::VectorXd out = im.a_rr * x;
  for (std::size_t i = 0; i < im.t_blocks.size(); ++i) {
    if (!im.t_lu[i]) {
      im.t_lu[i] = std::make_unique<Eigen::SparseLU<SpMat>>();
      im.t_lu[i]->compute(im.t_blocks[i]);
      if (im.t_lu[i]->info() != Eigen::Success) {
        throw std::runtime_error("dsa: current block factorization failed");
      }
    }
    out.noalias() -= im.a_rj[i] * im.t_lu[i]->solve((im.a_jr[i] * x).eval());
  }
  return out;
}

long DsaOperator::coupled_dim() const { return impl_->coupled.rows(); }

void DsaOperator::dump_triplets(std::ostream& os) const {
  const SpMat& m = impl_->coupled;
  char buf[96];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                    static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value());
      os << buf;
    }
  }
}

DsaOperator build_dsa(const TransportSystem& system) {
  return DsaOperator(system);
}

}  // namespace rte
