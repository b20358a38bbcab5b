#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rte/cases.hpp"
#include "rte/reports.hpp"

namespace rte {

//! Parsed solver-method selector.
//!
//! Accepted spellings (case-sensitive):
//!   "SI"                        plain source iteration
//!   "DSA" | "SI-DSA"            source iteration + diffusion correction
//!   "ROMIG" | "SI-ROMIG"        SI-DSA started from the reduced-order guess
//!   "ROMSA(w)" | "SI-ROMSA(w)"  reduced-order correction, window w
//!   "ROMSAD(w,t)" | "SI-ROMSAD(w,t)"  hybrid correction, switch depth t
//!   "PGMRES"                    diffusion-preconditioned restarted GMRES
//!   "PGMRES-ROMIG"              PGMRES started from the reduced-order guess
struct MethodSpec {
  enum class Kind { Si, Dsa, Romig, Romsa, Romsad, Pgmres, PgmresRomig };
  Kind kind = Kind::Dsa;
  int window = 0;  //!< correction training window (Romsa / Romsad)
  int theta = 0;   //!< hybrid switch depth (Romsad)
  std::string label;  //!< display label, e.g. "ROMSAD-3,3"

  bool needs_primary() const {
    return kind == Kind::Romig || kind == Kind::PgmresRomig;
  }
  bool needs_correction() const {
    return kind == Kind::Romsa || kind == Kind::Romsad;
  }
};

//! Parse a method selector; throws std::invalid_argument on bad syntax.
MethodSpec parse_method(const std::string& text);

//! Filesystem-safe directory name for a method label ("ROMSAD-3,3" ->
//! "ROMSAD-3_3").
std::string method_dirname(const std::string& label);

//! Where a case keeps its artifacts under an output root.
std::string case_dir(const std::string& out_root, const std::string& case_id);
std::string offline_dir(const std::string& out_root, const std::string& case_id);

//! What the offline stage produced (or found already on disk).
struct OfflineArtifacts {
  std::string dir;
  int n_snapshots = 0;
  int n_reused = 0;     //!< snapshot files accepted from a previous run
  int n_converged = 0;
  std::string primary_rom;                    //!< empty when no method needs it
  std::map<int, std::string> correction_roms; //!< window -> model path
  int r_p = 0;
  std::map<int, int> r_c;
  double snapshot_seconds = 0;
  double model_seconds = 0;
};

//! Collect training snapshots (reusing files whose header matches the case's
//! training settings) and build every reduced model the case's method list
//! requires.  Models are rebuilt whenever their stored tolerances differ
//! from the case's; snapshots are reused across tolerance changes since the
//! training stage does not depend on the truncation threshold.
OfflineArtifacts run_offline(const BenchmarkCase& c, const std::string& out_root,
                             std::ostream* log = nullptr);

//! One method's aggregate over the test set.
struct BenchResult {
  MetricsTable summary;
  std::vector<MethodDetail> details;
  std::vector<Params> test_set;
  double dsa_mean_wall = 0;  //!< mean SI-DSA solve seconds (0 if no DSA row)
};

//! Append offline-cost rows (snapshot/model build seconds and, when a DSA
//! row exists, their ratio to one mean full-order solve) to the summary.
void attach_offline_costs(BenchResult& result, const OfflineArtifacts& art);

//! Run every method of the case over its sampled test set.  Requires the
//! offline artifacts for any reduced-order method; throws naming the missing
//! file otherwise.  Relative times are normalized by the SI-DSA row when the
//! case includes one (0 otherwise).
BenchResult run_online(const BenchmarkCase& c, const std::string& out_root,
                       std::ostream* log = nullptr);

//! Solve a single parameter value with one method (CLI `solve` verb).
std::pair<Eigen::VectorXd, SolveReport> run_single(const BenchmarkCase& c,
                                                   const Params& mu,
                                                   const std::string& method,
                                                   const std::string& out_root);

//! Write summary.txt, report.txt and per-sample iteration histories under
//! the case directory.  Returns the summary path.
std::string write_bench_outputs(const BenchmarkCase& c, const BenchResult& r,
                                const std::string& out_root);

}  // namespace rte
