#pragma once

#include <string>
#include <vector>

#include "rte/solvers.hpp"

namespace rte {

//! One row of a benchmark summary: a solver method averaged over a test set.
struct MetricsRow {
  std::string method;   //!< display label, e.g. "ROMSAD-3,3"
  double n_sweep = 0.0; //!< mean transport sweeps per test parameter
  double t_rel = 0.0;   //!< mean wall time relative to the SI-DSA mean
  double resid = 0.0;   //!< max final scalar-flux residual over the test set
  int r_p = 0;          //!< rank of the primary reduced model (0 if unused)
  int r_c = 0;          //!< rank of the correction reduced model (0 if unused)
};

struct MetricsTable {
  std::string case_id;
  std::vector<MetricsRow> rows;
  //! Offline-cost records (name, value), e.g. snapshot/basis construction
  //! seconds and their ratio to one mean full-order solve.  Wall-derived,
  //! so excluded from summary comparison.
  std::vector<std::pair<std::string, double>> offline;
};

//! Render a table in the versioned tab-delimited summary format.
std::string serialize_summary(const MetricsTable& table);

//! Parse text produced by serialize_summary. Throws std::runtime_error on
//! malformed input (bad header, wrong column count, non-numeric fields).
MetricsTable parse_summary(const std::string& text);

//! Compare two summaries field by field, ignoring wall-clock-derived columns
//! (t_rel). Returns human-readable difference lines; empty means equivalent.
//! n_sweep and resid match when within `rel_tol` relatively (resid additionally
//! matches when both fall below `resid_floor`, where exact magnitudes are
//! round-off noise).
std::vector<std::string> compare_summaries(const MetricsTable& a,
                                           const MetricsTable& b,
                                           double rel_tol = 1e-9,
                                           double resid_floor = 1e-30);

//! Per-method detail: one line per test parameter.
struct MethodDetail {
  std::string method;
  std::vector<Params> params;
  std::vector<SolveReport> reports;
};

//! Render the per-sample report (parameters, sweeps, iterations, residual,
//! wall seconds, correction log) for every method of a case.
std::string serialize_report(const std::string& case_id,
                             const std::vector<MethodDetail>& methods);

//! Render an iteration history as "iter<TAB>change" lines with a header.
std::string serialize_history(const SolveReport& report);

}  // namespace rte
