#pragma once

#include <string>
#include <vector>

#include "rte/mesh.hpp"
#include "rte/problem.hpp"
#include "rte/quadrature.hpp"

namespace rte {

//! Full runs reproduce the reference tables; Half shrinks the mesh and the
//! quadrature (physics untouched) so every case fits a quick desk run.
//! Absolute iteration counts shift at Half scale, so reduced-scale checks
//! use ordering and ratio properties instead of the reference numbers.
enum class CaseScale { Full, Half };

struct BenchmarkCase {
  std::string id;
  CaseScale scale = CaseScale::Full;

  ProblemDefinition problem;
  Mesh mesh;
  AngularQuadrature quad;

  double eps_sisa = 1e-11;   //! online stopping tolerance
  double eps_train = 1e-11;  //! stopping tolerance for training solves
  double eps_pod = 1e-9;     //! basis truncation tolerance
  double gmres_rel_tol = 1e-11;

  int window = 3;      //! snapshot window stored during training
  int theta = 3;       //! hybrid-strategy switch iteration
  double eta = 0.1;    //! hybrid switching threshold factor

  std::vector<Params> train;
  int n_test = 20;
  unsigned long long seed = 0;

  std::vector<std::string> methods;  //! default benchmark table rows
  bool long_running = false;         //! excluded from default suites
};

std::vector<std::string> case_ids();

//! Instantiate one of the six benchmark problems at the requested scale.
//! Unknown ids throw.
BenchmarkCase define_case(const std::string& id, CaseScale scale = CaseScale::Full);

//! Seeded pseudo-random test parameters, re-drawn on any exact collision
//! with the training grid or an earlier draw, so test and training sets are
//! disjoint and runs are reproducible.
std::vector<Params> sample_test_set(const BenchmarkCase& c);

//! Scale rules (exposed for tests): cells halve with ceiling; quadrature
//! sizes halve then round up to even (antipodal pairing needs even counts).
int halved_cells(int n);
int halved_quadrature(int n);

}  // namespace rte
