#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "rte/snapshots.hpp"
#include "rte/strategies.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace rte;

namespace {

//! Slab with one parametric scattering term: sigma_s = 0.5 + 0.3 mu.
ProblemDefinition parametric_slab() {
  ProblemDefinition p;
  p.geometry = Geometry::Slab1D;
  CoefficientTerm t0;
  t0.absorption_weight = [](double, double) { return 0.2; };
  t0.scattering_weight = [](double, double) { return 0.5; };
  t0.name = "base";
  p.terms.push_back(t0);
  CoefficientTerm t1;
  t1.psi = [](const Params& mu) { return mu[0]; };
  t1.scattering_weight = [](double, double) { return 0.3; };
  t1.name = "mu0 scattering";
  p.terms.push_back(t1);
  p.source = [](double, double) { return 1.0; };
  p.inflow_left = 0.3;
  p.n_params = 1;
  p.param_ranges = {{0.0, 1.0}};
  return p;
}

struct Tiny {
  Mesh mesh = Mesh::slab_uniform(0.0, 2.0, 8);
  DgSpace space = build_dg_space(mesh);
  AngularQuadrature quad = gauss_legendre(4);
  ProblemDefinition prob = parametric_slab();
  TransportSystem at(double mu0) const {
    return TransportSystem(prob, mesh, space, quad, {mu0});
  }
};

VectorXd dense_kinetic_solve(const TransportSystem& sys) {
  return MatrixXd(sys.materialize_kinetic())
      .fullPivLu()
      .solve(sys.kinetic_rhs());
}

//! Orthonormalized column span of `a`.
MatrixXd qr_basis(const MatrixXd& a) {
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() * MatrixXd::Identity(a.rows(), a.cols());
}

MatrixXd dense_term_matrix(const TransportSystem& sys, int k) {
  const long m = sys.kinetic_dim();
  MatrixXd ak(m, m);
  VectorXd e = VectorXd::Zero(m), col(m);
  for (long j = 0; j < m; ++j) {
    e[j] = 1.0;
    sys.apply_term_kinetic(k, e.data(), col.data());
    ak.col(j) = col;
    e[j] = 0.0;
  }
  return ak;
}

}  // namespace

TEST_CASE("galerkin projections match dense oracles") {
  Tiny t;
  TransportSystem sys = t.at(0.4);
  const long m = sys.kinetic_dim();
  std::srand(99);
  MatrixXd u = qr_basis(MatrixXd::Random(m, 3));
  DenseColumnSource basis(u);
  VectorXd sv(5);
  sv << 1.0, 0.1, 0.01, 1e-13, 1e-14;
  ReducedModel model =
      build_reduced_model(sys, basis, sv, 1e-9, 1e-11, 'p', 0.5);

  CHECK(model.rank == 3);
  CHECK(model.k_affine == 2);
  CHECK(model.n_v == 4);
  CHECK(model.n_dof == sys.n_dof());
  CHECK(model.kind == 'p');
  CHECK((model.singular_values - sv.head(3)).norm() == 0.0);
  CHECK(model.discarded_fraction ==
        doctest::Approx((1e-13 + 1e-14) / sv.sum()).epsilon(1e-12));

  for (int k = 0; k < 2; ++k) {
    MatrixXd ak = dense_term_matrix(sys, k);
    CHECK((model.a_r[k] - u.transpose() * ak * u).cwiseAbs().maxCoeff() <
          1e-12);
  }
  CHECK((model.b_r - u.transpose() * sys.kinetic_rhs()).cwiseAbs().maxCoeff() <
        1e-13);

  // density lift maps: quadrature-weighted and plain block sums
  const long n = sys.n_dof();
  MatrixXd urho = MatrixXd::Zero(n, 3), uiso = MatrixXd::Zero(n, 3);
  for (int j = 0; j < 4; ++j) {
    urho += t.quad.weights[j] * u.middleRows(j * n, n);
    uiso += u.middleRows(j * n, n);
  }
  CHECK((model.u_rho - urho).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((model.u_iso - uiso).cwiseAbs().maxCoeff() < 1e-14);

  // assembled reduced operator respects the affine weights
  MatrixXd a_mu = model.assemble(sys);
  CHECK((a_mu - (model.a_r[0] + 0.4 * model.a_r[1])).cwiseAbs().maxCoeff() <
        1e-13);

  // a tiny memory budget forces the multi-batch path; results identical
  ReducedModel batched =
      build_reduced_model(sys, basis, sv, 1e-9, 1e-11, 'p', 0.5, 2048);
  CHECK((batched.a_r[0] - model.a_r[0]).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((batched.a_r[1] - model.a_r[1]).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((batched.b_r - model.b_r).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("a non-orthonormal basis is rejected") {
  Tiny t;
  TransportSystem sys = t.at(0.4);
  std::srand(100);
  MatrixXd u = qr_basis(MatrixXd::Random(sys.kinetic_dim(), 3));
  u.col(1) *= 1.1;
  DenseColumnSource basis(u);
  VectorXd sv = VectorXd::Ones(3);
  CHECK_THROWS(build_reduced_model(sys, basis, sv, 1e-9, 1e-11, 'p', 0.0));
}

TEST_CASE("reduced solve is exact when the solution lies in the span") {
  Tiny t;
  const double train[3] = {0.2, 0.5, 0.8};
  MatrixXd snaps(t.at(0.2).kinetic_dim(), 3);
  for (int i = 0; i < 3; ++i) {
    TransportSystem sys = t.at(train[i]);
    snaps.col(i) = dense_kinetic_solve(sys);
  }
  MatrixXd u = qr_basis(snaps);
  DenseColumnSource basis(u);
  VectorXd sv(3);
  sv << 1.0, 0.5, 0.25;  // placeholder spectrum; exactness only needs span
  TransportSystem sys05 = t.at(0.5);
  ReducedModel model =
      build_reduced_model(sys05, basis, sv, 1e-9, 1e-11, 'p', 0.0);

  VectorXd f_exact = dense_kinetic_solve(sys05);
  VectorXd rho_exact = sys05.density_of(f_exact.data());
  VectorXd rho_rom = romig(model, sys05);
  CHECK((rho_rom - rho_exact).lpNorm<Eigen::Infinity>() <
        1e-10 * rho_exact.lpNorm<Eigen::Infinity>());

  // Galerkin orthogonality of the kinetic residual against the basis
  MatrixXd a_mu_dense =
      dense_term_matrix(sys05, 0) + 0.5 * dense_term_matrix(sys05, 1);
  Eigen::FullPivLU<MatrixXd> lu(model.assemble(sys05));
  VectorXd c = lu.solve(model.b_r);
  VectorXd resid = sys05.kinetic_rhs() - a_mu_dense * (u * c);
  CHECK((u.transpose() * resid).lpNorm<Eigen::Infinity>() <
        1e-11 * sys05.kinetic_rhs().norm());
}

TEST_CASE("romig rejects a singular reduced operator") {
  Tiny t;
  TransportSystem sys = t.at(0.4);
  ReducedModel broken;
  broken.geometry = 0;
  broken.n_v = t.quad.n();
  broken.n_dof = sys.n_dof();
  broken.rank = 1;
  broken.k_affine = 2;
  broken.a_r = {MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1)};
  broken.u_rho = MatrixXd::Zero(sys.n_dof(), 1);
  broken.u_iso = MatrixXd::Zero(sys.n_dof(), 1);
  broken.b_r = VectorXd::Zero(1);
  broken.singular_values = VectorXd::Ones(1);
  CHECK_THROWS(romig(broken, sys));

  // the acceleration strategy degrades gracefully instead
  RomsaStrategy strat(broken);
  strat.setup(sys);
  CHECK(strat.singular());
  VectorXd delta = VectorXd::Constant(sys.n_dof(), 0.7);
  VectorXd corr = strat.correct(1, delta);
  CHECK(corr.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(strat.last_kind() == 'S');
}

TEST_CASE("reduced-order correction matches its dense formula") {
  Tiny t;
  const double train[3] = {0.2, 0.5, 0.8};
  MatrixXd snaps(t.at(0.2).kinetic_dim(), 3);
  for (int i = 0; i < 3; ++i)
    snaps.col(i) = dense_kinetic_solve(t.at(train[i]));
  MatrixXd u = qr_basis(snaps);
  DenseColumnSource basis(u);
  VectorXd sv(3);
  sv << 1.0, 0.5, 0.25;
  TransportSystem sys = t.at(0.33);
  ReducedModel model = build_reduced_model(sys, basis, sv, 1e-9, 1e-11, 'c', 0.0);

  RomsaStrategy strat(model);
  strat.setup(sys);
  std::srand(17);
  VectorXd delta = VectorXd::Random(sys.n_dof());
  VectorXd corr = strat.correct(1, delta);
  CHECK(strat.last_kind() == 'R');

  VectorXd rhs_r = model.u_iso.transpose() * sys.apply_Ms(delta);
  VectorXd manual = model.u_rho *
                    model.assemble(sys).fullPivLu().solve(rhs_r);
  CHECK((corr - manual).lpNorm<Eigen::Infinity>() <
        1e-12 * (manual.lpNorm<Eigen::Infinity>() + 1.0));

  // zero change produces a zero correction
  CHECK(strat.correct(2, VectorXd::Zero(sys.n_dof()))
            .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("hybrid correction switches from reduced model to diffusion") {
  Tiny t;
  const double train[3] = {0.2, 0.5, 0.8};
  MatrixXd snaps(t.at(0.2).kinetic_dim(), 3);
  for (int i = 0; i < 3; ++i)
    snaps.col(i) = dense_kinetic_solve(t.at(train[i]));
  MatrixXd u = qr_basis(snaps);
  DenseColumnSource basis(u);
  VectorXd sv(3);
  sv << 1.0, 0.5, 0.25;
  TransportSystem sys = t.at(0.5);
  ReducedModel model = build_reduced_model(sys, basis, sv, 1e-9, 1e-11, 'c', 0.0);
  DsaOperator dsa = build_dsa(sys);
  VectorXd big = VectorXd::Constant(sys.n_dof(), 1.0);
  VectorXd tiny_delta = VectorXd::Constant(sys.n_dof(), 1e-14);

  {  // iteration budget: reduced while l <= theta, diffusion afterwards
    RomsadStrategy s(model, dsa, 2, 1e-10, "ROMSAD-test");
    s.setup(sys);
    s.correct(1, big);
    CHECK(s.last_kind() == 'R');
    s.correct(2, big);
    CHECK(s.last_kind() == 'R');
    VectorXd corr = s.correct(3, big);
    CHECK(s.last_kind() == 'D');
    CHECK((corr - dsa.correct(big)).lpNorm<Eigen::Infinity>() < 1e-14);
    // monotone: no way back, even for small l and large change
    s.correct(1, big);
    CHECK(s.last_kind() == 'D');
  }
  {  // change below the switching tolerance hands over immediately
    RomsadStrategy s(model, dsa, 10, 1e-10);
    s.setup(sys);
    s.correct(1, tiny_delta);
    CHECK(s.last_kind() == 'D');
  }
  {  // a huge switching tolerance means diffusion from the start
    RomsadStrategy s(model, dsa, 10, 1e10);
    s.setup(sys);
    s.correct(1, big);
    CHECK(s.last_kind() == 'D');
  }

  CHECK(romsad_tolerance(1e-11, 1e-9) == doctest::Approx(1e-10));
  CHECK(romsad_tolerance(1e-9, 1e-11) == doctest::Approx(1e-10));
  CHECK(romsad_tolerance(1e-12, 1e-10, 0.5) == doctest::Approx(5e-11));
}

TEST_CASE("snapshot collection and the correction-source identity") {
  Tiny t;
  namespace fs = std::filesystem;
  const std::string dir = "rom_test_snaps";
  fs::remove_all(dir);
  fs::create_directories(dir);

  TrainingConfig tc;
  tc.window = 3;
  tc.eps_train = 1e-12;
  const double train[2] = {0.3, 0.7};
  for (int i = 0; i < 2; ++i) {
    TransportSystem sys = t.at(train[i]);
    DsaOperator dsa = build_dsa(sys);
    char name[64];
    std::snprintf(name, sizeof name, "%s/snap_%03d.snap", dir.c_str(), i);
    SnapshotInfo info = collect_snapshots(sys, dsa, tc, name);
    CHECK(info.converged);
    CHECK(info.w_mu == 3);
    CHECK(info.n_conv > 3);
    CHECK(info.mu == Params{train[i]});

    // header round trip
    SnapshotInfo h = read_snapshot_header(name);
    CHECK(h.mu == info.mu);
    CHECK(h.window == tc.window);
    CHECK(h.w_mu == info.w_mu);
    CHECK(h.n_conv == info.n_conv);
    CHECK(h.converged);
    CHECK(h.eps_train == tc.eps_train);
  }

  SnapshotStore store = SnapshotStore::open(dir);
  REQUIRE(store.n_mu() == 2);
  CHECK(store.n_v() == 4);
  CHECK(store.n_dof() == t.at(0.3).n_dof());
  CHECK(store.primary_cols() == 2);
  CHECK(store.correction_cols() == 6);
  CHECK(store.correction_cols(1) == 2);
  CHECK(store.correction_cols(2) == 4);

  const long m = store.kinetic_dim();
  const long n = store.n_dof();

  // each difference snapshot solves the correction equation:
  // A_mu (f - f^(l)) = Ms drho^(l), stacked per direction
  for (int i = 0; i < 2; ++i) {
    TransportSystem sys = t.at(train[i]);
    VectorXd fc(m), fl(m), lhs(m);
    store.converged_f(i, fc.data());
    for (int l = 1; l <= store.info(i).w_mu; ++l) {
      store.intermediate_f(i, l, fl.data());
      VectorXd df = fc - fl;
      sys.apply_kinetic(df.data(), lhs.data());
      VectorXd msd = sys.apply_Ms(store.delta_rho(i, l));
      for (int j = 0; j < 4; ++j)
        CHECK((lhs.segment(j * n, n) - msd).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }

  // the streamed training matrices expose exactly those columns
  auto prim = store.primary_source();
  REQUIRE(prim->cols() == 2);
  VectorXd col(m), fc(m);
  prim->column(1, col.data());
  store.converged_f(1, fc.data());
  CHECK((col - fc).lpNorm<Eigen::Infinity>() == 0.0);

  auto corr1 = store.correction_source(1);
  REQUIRE(corr1->cols() == 2);
  corr1->column(0, col.data());
  store.converged_f(0, fc.data());
  VectorXd fl(m);
  store.intermediate_f(0, 1, fl.data());
  CHECK((col - (fc - fl)).lpNorm<Eigen::Infinity>() == 0.0);

  // a non-converged parameter is recorded but excluded from training
  {
    TransportSystem sys = t.at(0.9);
    DsaOperator dsa = build_dsa(sys);
    TrainingConfig capped = tc;
    capped.max_iters = 2;
    SnapshotInfo info =
        collect_snapshots(sys, dsa, capped, dir + "/snap_bad.snap");
    CHECK(!info.converged);
  }
  SnapshotStore store2 = SnapshotStore::open(dir);
  CHECK(store2.n_mu() == 3);
  CHECK(store2.primary_cols() == 2);
  CHECK(store2.correction_cols() == 6);

  fs::remove_all(dir);
}

TEST_CASE("reduced models round-trip through their file format") {
  Tiny t;
  TransportSystem sys = t.at(0.4);
  std::srand(5);
  MatrixXd u = qr_basis(MatrixXd::Random(sys.kinetic_dim(), 2));
  DenseColumnSource basis(u);
  VectorXd sv(4);
  sv << 2.0, 1.0, 1e-12, 1e-13;
  ReducedModel model =
      build_reduced_model(sys, basis, sv, 1e-8, 1e-10, 'c', 1.25);
  model.save("rom_test_model.rom");
  ReducedModel back = ReducedModel::load("rom_test_model.rom");

  CHECK(back.geometry == model.geometry);
  CHECK(back.n_v == model.n_v);
  CHECK(back.n_dof == model.n_dof);
  CHECK(back.rank == model.rank);
  CHECK(back.k_affine == model.k_affine);
  CHECK(back.kind == 'c');
  CHECK(back.eps_pod == model.eps_pod);
  CHECK(back.eps_train == model.eps_train);
  CHECK(back.discarded_fraction == model.discarded_fraction);
  CHECK(back.basis_seconds == model.basis_seconds);
  CHECK((back.u_rho - model.u_rho).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.u_iso - model.u_iso).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < model.k_affine; ++k)
    CHECK((back.a_r[k] - model.a_r[k]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b_r - model.b_r).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.singular_values - model.singular_values).cwiseAbs().maxCoeff() ==
        0.0);
  std::remove("rom_test_model.rom");

  CHECK_THROWS(ReducedModel::load("rom_test_missing.rom"));
}
