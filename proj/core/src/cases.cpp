#include "rte/cases.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rte {

namespace {

double unit_draw(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1p-53;
}

//! Affine term whose psi picks one parameter component.
CoefficientTerm param_term(int index, SpatialFn absorption, SpatialFn scattering,
                           std::string name) {
  CoefficientTerm t;
  t.psi = [index](const Params& mu) { return mu[index]; };
  t.absorption_weight = std::move(absorption);
  t.scattering_weight = std::move(scattering);
  t.name = std::move(name);
  return t;
}

BenchmarkCase cross_regime(CaseScale scale) {
  BenchmarkCase c;
  c.id = "cross_regime";
  c.problem.geometry = Geometry::Slab1D;
  c.problem.n_params = 1;
  c.problem.param_ranges = {{10.0, 20.0}};

  CoefficientTerm base;
  base.scattering_weight = [](double, double) { return 0.1; };
  base.name = "floor";
  c.problem.terms = {base,
                     param_term(0, nullptr,
                                [](double x, double) { return x; }, "slope")};
  c.problem.source = [](double, double) { return 0.01; };

  int cells = scale == CaseScale::Full ? 400 : halved_cells(400);
  int n_dirs = scale == CaseScale::Full ? 16 : halved_quadrature(16);
  c.mesh = Mesh::slab_uniform(0.0, 10.0, cells);
  c.quad = gauss_legendre(n_dirs);

  c.eps_sisa = 1e-11;
  c.eps_train = 1e-11;
  c.eps_pod = 1e-11;
  c.gmres_rel_tol = 1e-11;
  c.window = 3;
  c.theta = 3;
  for (int j = 0; j <= 40; ++j) c.train.push_back({10.0 + 0.25 * j});
  c.n_test = 20;
  c.seed = 20260814ull;
  c.methods = {"SI-DSA",        "SI-ROMIG",     "SI-ROMSA(1)",
               "SI-ROMSAD(1,3)", "SI-ROMSA(3)", "SI-ROMSAD(3,3)"};
  return c;
}

BenchmarkCase two_material(CaseScale scale) {
  BenchmarkCase c;
  c.id = "two_material";
  c.problem.geometry = Geometry::Slab1D;
  c.problem.n_params = 2;
  c.problem.param_ranges = {{0.5, 1.5}, {10.0, 50.0}};

  auto left = [](double x, double) { return x <= 1.0 ? 1.0 : 0.0; };
  auto right = [](double x, double) { return x > 1.0 ? 1.0 : 0.0; };
  CoefficientTerm base;
  base.name = "streaming";
  c.problem.terms = {base, param_term(0, left, nullptr, "absorber"),
                     param_term(1, nullptr, right, "scatterer")};
  c.problem.source = [](double, double) { return 0.0; };
  c.problem.inflow_left = 5.0;

  int n1 = scale == CaseScale::Full ? 100 : halved_cells(100);
  int n2 = scale == CaseScale::Full ? 100 : halved_cells(100);
  std::vector<double> bounds;
  for (int i = 0; i <= n1; ++i) bounds.push_back(1.0 * i / n1);
  for (int i = 1; i <= n2; ++i) bounds.push_back(1.0 + 10.0 * i / n2);
  c.mesh = Mesh::slab(bounds);
  c.quad = gauss_legendre(scale == CaseScale::Full ? 16 : halved_quadrature(16));

  c.eps_sisa = 1e-12;
  c.eps_train = 1e-12;
  c.eps_pod = 1e-10;
  c.gmres_rel_tol = 1e-12;
  c.window = 5;  // table compares window sizes 3 and 5
  c.theta = 3;
  for (int m = 0; m <= 10; ++m)
    for (int n = 0; n <= 40; ++n)
      c.train.push_back({0.5 + 0.1 * m, 10.0 + 1.0 * n});
  c.n_test = 20;
  c.seed = 20260815ull;
  c.methods = {"SI-DSA", "SI-ROMIG", "SI-ROMSAD(3,3)", "SI-ROMSAD(5,3)"};
  return c;
}

BenchmarkCase homogeneous(CaseScale scale) {
  BenchmarkCase c;
  c.id = "homogeneous";
  c.problem.geometry = Geometry::XY2D;
  c.problem.n_params = 1;
  c.problem.param_ranges = {{0.9, 1.1}};

  CoefficientTerm base;
  base.name = "streaming";
  c.problem.terms = {
      base, param_term(0, nullptr, [](double, double) { return 1.0; }, "medium")};
  c.problem.source = [](double x, double y) {
    double dx = x - 0.5, dy = y - 0.5;
    return std::exp(-100.0 * (dx * dx + dy * dy));
  };

  int n = scale == CaseScale::Full ? 80 : halved_cells(80);
  c.mesh = Mesh::rect_uniform(0.0, 1.0, n, 0.0, 1.0, n);
  c.quad = scale == CaseScale::Full
               ? chebyshev_legendre(30, 6)
               : chebyshev_legendre(halved_quadrature(30), halved_quadrature(6));

  c.eps_sisa = 1e-12;
  c.eps_train = 1e-12;
  c.eps_pod = 1e-9;
  c.gmres_rel_tol = 1e-11;
  c.window = 3;
  c.theta = 3;
  for (int m = 0; m <= 20; ++m) c.train.push_back({0.9 + 0.005 * m});
  c.n_test = 10;
  c.seed = 20260816ull;
  c.methods = {"SI-DSA", "SI-ROMIG",       "SI-ROMSA(3)",
               "SI-ROMSAD(3,3)", "PGMRES", "PGMRES-ROMIG"};
  return c;
}

BenchmarkCase lattice(CaseScale scale) {
  BenchmarkCase c;
  c.id = "lattice";
  c.problem.geometry = Geometry::XY2D;
  c.problem.n_params = 2;
  c.problem.param_ranges = {{95.0, 105.0}, {0.5, 1.5}};

  // Checkerboard of 12 unit absorber blocks on the 5x5 block grid; the
  // center block carries the unit source and scatters like the background.
  auto absorber = [](double x, double y) {
    int ix = static_cast<int>(std::floor(x));
    int iy = static_cast<int>(std::floor(y));
    if (ix < 0) ix = 0;
    if (ix > 4) ix = 4;
    if (iy < 0) iy = 0;
    if (iy > 4) iy = 4;
    return (ix + iy) % 2 == 1 ? 1.0 : 0.0;
  };
  auto scatterer = [absorber](double x, double y) {
    return 1.0 - absorber(x, y);
  };
  CoefficientTerm base;
  base.name = "streaming";
  c.problem.terms = {base, param_term(0, absorber, nullptr, "absorber"),
                     param_term(1, nullptr, scatterer, "scatterer")};
  c.problem.source = [](double x, double y) {
    return (std::fabs(x - 2.5) < 0.5 && std::fabs(y - 2.5) < 0.5) ? 1.0 : 0.0;
  };

  int n = scale == CaseScale::Full ? 50 : halved_cells(50);
  c.mesh = Mesh::rect_uniform(0.0, 5.0, n, 0.0, 5.0, n);
  c.quad = scale == CaseScale::Full
               ? chebyshev_legendre(40, 6)
               : chebyshev_legendre(halved_quadrature(40), halved_quadrature(6));

  c.eps_sisa = 1e-12;
  c.eps_train = 1e-12;
  c.eps_pod = 1e-11;
  c.gmres_rel_tol = 1e-12;
  c.window = 3;
  c.theta = 5;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j)
      c.train.push_back({95.0 + 1.0 * i, 0.5 + 0.1 * j});
  c.n_test = 10;
  c.seed = 20260817ull;
  c.methods = {"SI-DSA", "SI-ROMIG", "SI-ROMSAD(3,5)", "PGMRES", "PGMRES-ROMIG"};
  c.long_running = true;
  return c;
}

BenchmarkCase pin_cell(CaseScale scale) {
  BenchmarkCase c;
  c.id = "pin_cell";
  c.problem.geometry = Geometry::XY2D;
  c.problem.n_params = 2;
  c.problem.param_ranges = {{0.05, 0.5}, {0.05, 0.5}};

  auto inner = [](double x, double y) {
    return (std::fabs(x) <= 0.5 && std::fabs(y) <= 0.5) ? 1.0 : 0.0;
  };
  CoefficientTerm base;
  base.scattering_weight = [inner](double x, double y) {
    return 100.0 * (1.0 - inner(x, y));
  };
  base.name = "cladding";
  c.problem.terms = {base, param_term(0, inner, nullptr, "fuel_absorption"),
                     param_term(1, nullptr, inner, "fuel_scattering")};
  c.problem.source = [](double x, double y) {
    return std::exp(-100.0 * (x * x + y * y));
  };

  int n = scale == CaseScale::Full ? 80 : halved_cells(80);
  c.mesh = Mesh::rect_uniform(-1.0, 1.0, n, -1.0, 1.0, n);
  c.quad = scale == CaseScale::Full
               ? chebyshev_legendre(30, 6)
               : chebyshev_legendre(halved_quadrature(30), halved_quadrature(6));

  c.eps_sisa = 1e-11;
  c.eps_train = 1e-11;
  c.eps_pod = 1e-9;
  c.gmres_rel_tol = 2.5e-11;
  c.window = 3;
  c.theta = 5;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) c.train.push_back({0.05 * i, 0.05 * j});
  c.n_test = 10;
  c.seed = 20260818ull;
  c.methods = {"SI-DSA", "SI-ROMIG", "SI-ROMSAD(3,5)", "PGMRES", "PGMRES-ROMIG"};
  return c;
}

BenchmarkCase variable_scattering(CaseScale scale) {
  BenchmarkCase c;
  c.id = "variable_scattering";
  c.problem.geometry = Geometry::XY2D;
  c.problem.n_params = 1;
  c.problem.param_ranges = {{49.9, 99.9}};

  CoefficientTerm base;
  base.scattering_weight = [](double, double) { return 0.1; };
  base.name = "floor";
  auto ramp = [](double x, double y) {
    double r2 = x * x + y * y;
    if (r2 >= 1.0) return 1.0;
    double r4 = r2 * r2;
    double s = 2.0 - r2;
    return r4 * s * s;
  };
  c.problem.terms = {base, param_term(0, nullptr, ramp, "ramp")};
  c.problem.source = [](double x, double y) {
    return 10.0 / M_PI * std::exp(-100.0 * (x * x + y * y));
  };

  int n = scale == CaseScale::Full ? 80 : halved_cells(80);
  c.mesh = Mesh::rect_uniform(-1.0, 1.0, n, -1.0, 1.0, n);
  c.quad = scale == CaseScale::Full
               ? chebyshev_legendre(30, 6)
               : chebyshev_legendre(halved_quadrature(30), halved_quadrature(6));

  c.eps_sisa = 1e-12;
  c.eps_train = 1e-12;
  c.eps_pod = 1e-11;
  c.gmres_rel_tol = 2.5e-11;
  c.window = 3;
  c.theta = 5;
  for (int j = 0; j < 50; ++j) c.train.push_back({49.9 + 50.0 / 49.0 * j});
  c.n_test = 10;
  c.seed = 20260819ull;
  c.methods = {"SI-DSA", "SI-ROMIG", "SI-ROMSAD(3,5)", "PGMRES", "PGMRES-ROMIG"};
  return c;
}

}  // namespace

std::vector<std::string> case_ids() {
  return {"cross_regime", "two_material", "homogeneous",
          "lattice",      "pin_cell",     "variable_scattering"};
}

int halved_cells(int n) { return (n + 1) / 2; }

int halved_quadrature(int n) {
  int h = (n + 1) / 2;
  return h % 2 == 0 ? h : h + 1;
}

BenchmarkCase define_case(const std::string& id, CaseScale scale) {
  auto build = [&]() -> BenchmarkCase {
    if (id == "cross_regime") return cross_regime(scale);
    if (id == "two_material") return two_material(scale);
    if (id == "homogeneous") return homogeneous(scale);
    if (id == "lattice") return lattice(scale);
    if (id == "pin_cell") return pin_cell(scale);
    if (id == "variable_scattering") return variable_scattering(scale);
    throw std::invalid_argument("define_case: unknown case id '" + id + "'");
  };
  BenchmarkCase c = build();
  c.scale = scale;
  return c;
}

std::vector<Params> sample_test_set(const BenchmarkCase& c) {
  std::mt19937_64 gen(c.seed);
  const auto& ranges = c.problem.param_ranges;
  std::vector<Params> test;
  while (static_cast<int>(test.size()) < c.n_test) {
    Params p(ranges.size());
    for (size_t d = 0; d < ranges.size(); ++d)
      p[d] = ranges[d].first + (ranges[d].second - ranges[d].first) * unit_draw(gen);
    bool collides = false;
    for (const auto& q : c.train)
      if (q == p) collides = true;
    for (const auto& q : test)
      if (q == p) collides = true;
    if (!collides) test.push_back(p);
  }
  return test;
}

}  // namespace rte
