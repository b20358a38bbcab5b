#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rte/quadrature.hpp"

namespace rte {

using Params = std::vector<double>;
using SpatialFn = std::function<double(double, double)>;  // (x, y); y ignored in slab
using ParamFn = std::function<double(const Params&)>;

//! One affine contribution to the cross sections:
//!   sigma_a(x; mu) += psi(mu) * absorption_weight(x)
//!   sigma_s(x; mu) += psi(mu) * scattering_weight(x)
//! Either weight may be null.  terms[0] must have psi identically 1: it is
//! the parameter-independent part, and the streaming operator is folded into
//! operator term 0 of the affine decomposition A_mu = sum_k psi_k(mu) A_k.
//! Declaring the dependence term-by-term makes non-affine coefficients
//! unrepresentable rather than a runtime failure.
struct CoefficientTerm {
  ParamFn psi;
  SpatialFn absorption_weight;
  SpatialFn scattering_weight;
  std::string name;
};

struct ProblemDefinition {
  Geometry geometry = Geometry::Slab1D;
  std::vector<CoefficientTerm> terms;
  SpatialFn source;  // isotropic source G(x)

  // Constant isotropic inflow per boundary side (slab uses left/right).
  double inflow_left = 0, inflow_right = 0, inflow_bottom = 0, inflow_top = 0;

  int n_params = 0;
  std::vector<std::pair<double, double>> param_ranges;

  double sigma_a(const Params& mu, double x, double y = 0) const;
  double sigma_s(const Params& mu, double x, double y = 0) const;
};

}  // namespace rte
