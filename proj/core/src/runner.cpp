#include "rte/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>

#include "rte/dsa.hpp"
#include "rte/reduced_model.hpp"
#include "rte/snapshots.hpp"
#include "rte/strategies.hpp"
#include "rte/transport_system.hpp"

namespace rte {

namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

int parse_int(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size() || v <= 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("method '" + context +
                                "': expected a positive integer, got '" + s +
                                "'");
  }
}

std::string snapshot_path(const std::string& dir, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%03d.snap", i);
  return dir + "/snaps/" + buf;
}

bool snapshot_reusable(const std::string& path, const Params& mu, int window,
                       double eps_train) {
  if (!fs::exists(path)) return false;
  try {
    SnapshotInfo hdr = read_snapshot_header(path);
    return hdr.mu == mu && hdr.window == window &&
           hdr.eps_train == eps_train && hdr.converged;
  } catch (const std::exception&) {
    return false;
  }
}

//! Loads an existing reduced model when its provenance matches the case's
//! current settings; nullopt means it must be (re)built.
std::optional<ReducedModel> reusable_model(const std::string& path,
                                           const BenchmarkCase& c, char kind,
                                           long n_v, long n_dof) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    ReducedModel m = ReducedModel::load(path);
    if (m.kind == kind && m.eps_pod == c.eps_pod && m.eps_train == c.eps_train &&
        m.n_v == n_v && m.n_dof == n_dof &&
        m.geometry == static_cast<int>(c.problem.geometry))
      return m;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::string format_params(const Params& p) {
  std::string out = "(";
  char buf[32];
  for (size_t d = 0; d < p.size(); ++d) {
    std::snprintf(buf, sizeof buf, "%.6g", p[d]);
    out += (d ? "," : "") + std::string(buf);
  }
  return out + ")";
}

struct LoadedModels {
  std::optional<ReducedModel> primary;
  std::map<int, ReducedModel> corrections;
};

//! Method requirements of a case: which reduced models must exist.
struct Needs {
  bool primary = false;
  std::set<int> windows;
  bool dsa = false;
};

Needs analyze_methods(const BenchmarkCase& c,
                      std::vector<MethodSpec>* specs_out) {
  Needs needs;
  for (const auto& text : c.methods) {
    MethodSpec spec = parse_method(text);
    if (spec.needs_primary()) needs.primary = true;
    if (spec.needs_correction()) {
      if (spec.window > c.window)
        throw std::invalid_argument(
            "method '" + text + "' needs window " + std::to_string(spec.window) +
            " but the case trains with window " + std::to_string(c.window));
      needs.windows.insert(spec.window);
    }
    if (spec.kind != MethodSpec::Kind::Si &&
        spec.kind != MethodSpec::Kind::Romsa)
      needs.dsa = true;
    if (specs_out) specs_out->push_back(std::move(spec));
  }
  return needs;
}

std::string correction_rom_path(const std::string& dir, int window) {
  return dir + "/correction_w" + std::to_string(window) + ".rom";
}

LoadedModels load_models(const BenchmarkCase& c, const std::string& odir,
                         const Needs& needs, long n_v, long n_dof) {
  LoadedModels models;
  auto check = [&](const ReducedModel& m, const std::string& path) {
    if (m.n_v != n_v || m.n_dof != n_dof ||
        m.geometry != static_cast<int>(c.problem.geometry))
      throw std::runtime_error("reduced model '" + path +
                               "' does not match the case discretization");
    if (m.eps_pod != c.eps_pod || m.eps_train != c.eps_train)
      throw std::runtime_error(
          "reduced model '" + path +
          "' was built with different tolerances; rerun the offline stage");
  };
  if (needs.primary) {
    std::string path = odir + "/primary.rom";
    if (!fs::exists(path))
      throw std::runtime_error("missing reduced model '" + path +
                               "'; run the offline stage first");
    models.primary = ReducedModel::load(path);
    check(*models.primary, path);
  }
  for (int w : needs.windows) {
    std::string path = correction_rom_path(odir, w);
    if (!fs::exists(path))
      throw std::runtime_error("missing reduced model '" + path +
                               "'; run the offline stage first");
    auto [it, ok] = models.corrections.emplace(w, ReducedModel::load(path));
    (void)ok;
    check(it->second, path);
  }
  return models;
}

//! Solve one parameter value with one method.  The DSA operator is shared
//! across methods for the same parameter; wall time covers the solve itself
//! plus any reduced-order guess construction, not operator assembly.
std::pair<Eigen::VectorXd, SolveReport> dispatch(
    const BenchmarkCase& c, const MethodSpec& spec, const TransportSystem& sys,
    const DsaOperator* dsa, const LoadedModels& models) {
  SolveConfig cfg;
  cfg.eps_sisa = c.eps_sisa;
  cfg.gmres_rel_tol = c.gmres_rel_tol;
  Timer timer;
  std::pair<Eigen::VectorXd, SolveReport> out;
  switch (spec.kind) {
    case MethodSpec::Kind::Si:
      out = sisa_solve(sys, nullptr, cfg);
      break;
    case MethodSpec::Kind::Dsa: {
      DsaStrategy strat(*dsa);
      out = sisa_solve(sys, &strat, cfg);
      break;
    }
    case MethodSpec::Kind::Romig: {
      cfg.initial_guess = romig(*models.primary, sys);
      DsaStrategy strat(*dsa);
      out = sisa_solve(sys, &strat, cfg);
      break;
    }
    case MethodSpec::Kind::Romsa: {
      RomsaStrategy strat(models.corrections.at(spec.window), spec.label);
      out = sisa_solve(sys, &strat, cfg);
      break;
    }
    case MethodSpec::Kind::Romsad: {
      const ReducedModel& model = models.corrections.at(spec.window);
      RomsadStrategy strat(model, *dsa, spec.theta,
                           romsad_tolerance(c.eps_train, model.eps_pod, c.eta),
                           spec.label);
      out = sisa_solve(sys, &strat, cfg);
      break;
    }
    case MethodSpec::Kind::Pgmres:
      out = gmres_solve(sys, dsa, cfg);
      break;
    case MethodSpec::Kind::PgmresRomig:
      cfg.initial_guess = romig(*models.primary, sys);
      out = gmres_solve(sys, dsa, cfg);
      break;
  }
  out.second.wall_seconds = timer.seconds();
  return out;
}

}  // namespace

MethodSpec parse_method(const std::string& text) {
  MethodSpec spec;
  if (text == "SI") {
    spec.kind = MethodSpec::Kind::Si;
    spec.label = "SI";
    return spec;
  }
  if (text == "PGMRES") {
    spec.kind = MethodSpec::Kind::Pgmres;
    spec.label = "PGMRES";
    return spec;
  }
  if (text == "PGMRES-ROMIG") {
    spec.kind = MethodSpec::Kind::PgmresRomig;
    spec.label = "PGMRES-ROMIG";
    return spec;
  }
  std::string rest = text.rfind("SI-", 0) == 0 ? text.substr(3) : text;
  if (rest == "DSA") {
    spec.kind = MethodSpec::Kind::Dsa;
    spec.label = "DSA";
    return spec;
  }
  if (rest == "ROMIG") {
    spec.kind = MethodSpec::Kind::Romig;
    spec.label = "ROMIG";
    return spec;
  }
  auto args_of = [&](const std::string& head) -> std::optional<std::string> {
    if (rest.rfind(head + "(", 0) == 0 && rest.back() == ')')
      return rest.substr(head.size() + 1,
                         rest.size() - head.size() - 2);
    return std::nullopt;
  };
  if (auto args = args_of("ROMSAD")) {
    size_t comma = args->find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("method '" + text +
                                  "': expected ROMSAD(window,theta)");
    spec.kind = MethodSpec::Kind::Romsad;
    spec.window = parse_int(args->substr(0, comma), text);
    spec.theta = parse_int(args->substr(comma + 1), text);
    spec.label = "ROMSAD-" + std::to_string(spec.window) + "," +
                 std::to_string(spec.theta);
    return spec;
  }
  if (auto args = args_of("ROMSA")) {
    spec.kind = MethodSpec::Kind::Romsa;
    spec.window = parse_int(*args, text);
    spec.label = "ROMSA-" + std::to_string(spec.window);
    return spec;
  }
  throw std::invalid_argument("unknown method '" + text + "'");
}

std::string method_dirname(const std::string& label) {
  std::string out = label;
  for (char& ch : out)
    if (ch == ',' || ch == '(' || ch == ')') ch = '_';
  return out;
}

std::string case_dir(const std::string& out_root, const std::string& case_id) {
  return out_root + "/" + case_id;
}

std::string offline_dir(const std::string& out_root,
                        const std::string& case_id) {
  return case_dir(out_root, case_id) + "/offline";
}

OfflineArtifacts run_offline(const BenchmarkCase& c, const std::string& out_root,
                             std::ostream* log) {
  const std::string odir = offline_dir(out_root, c.id);
  fs::create_directories(odir + "/snaps");
  DgSpace space = build_dg_space(c.mesh);
  Needs needs = analyze_methods(c, nullptr);

  OfflineArtifacts art;
  art.dir = odir;
  art.n_snapshots = static_cast<int>(c.train.size());

  Timer t_snap;
  for (size_t i = 0; i < c.train.size(); ++i) {
    const std::string path = snapshot_path(odir, static_cast<int>(i));
    if (snapshot_reusable(path, c.train[i], c.window, c.eps_train)) {
      ++art.n_reused;
      continue;
    }
    TransportSystem sys(c.problem, c.mesh, space, c.quad, c.train[i]);
    DsaOperator dsa(sys);
    TrainingConfig tc;
    tc.window = c.window;
    tc.eps_train = c.eps_train;
    SnapshotInfo info = collect_snapshots(sys, dsa, tc, path);
    if (log)
      *log << "[offline " << c.id << "] train " << i << "/" << c.train.size()
           << " mu=" << format_params(c.train[i]) << " iters=" << info.n_conv
           << (info.converged ? "" : " NOT CONVERGED") << " ("
           << info.seconds << " s)\n"
           << std::flush;
  }
  art.snapshot_seconds = t_snap.seconds();

  SnapshotStore store = SnapshotStore::open(odir + "/snaps");
  for (const auto& info : store.infos())
    if (info.converged) ++art.n_converged;

  Timer t_models;
  TransportSystem repr(c.problem, c.mesh, space, c.quad, c.train.front());
  if (needs.primary) {
    const std::string rom_path = odir + "/primary.rom";
    auto reused =
        reusable_model(rom_path, c, 'p', repr.quad().n(), repr.n_dof());
    if (reused) {
      art.r_p = reused->rank;
    } else {
      PodOptions po;
      po.eps_pod = c.eps_pod;
      po.scratch_dir = odir;
      po.basis_path = odir + "/u_primary.bin";
      PodResult pod = pod_truncate(*store.primary_source(), po);
      ReducedModel model =
          build_reduced_model(repr, pod, c.eps_pod, c.eps_train, 'p');
      model.save(rom_path);
      art.r_p = model.rank;
      if (log)
        *log << "[offline " << c.id << "] primary model rank " << model.rank
             << " (svd " << pod.seconds << " s)\n";
    }
    art.primary_rom = rom_path;
  }
  for (int w : needs.windows) {
    const std::string rom_path = correction_rom_path(odir, w);
    auto reused = reusable_model(rom_path, c, 'c', repr.quad().n(), repr.n_dof());
    if (reused) {
      art.r_c[w] = reused->rank;
    } else {
      PodOptions po;
      po.eps_pod = c.eps_pod;
      po.scratch_dir = odir;
      po.basis_path = odir + "/u_correction_w" + std::to_string(w) + ".bin";
      PodResult pod = pod_truncate(*store.correction_source(w), po);
      ReducedModel model =
          build_reduced_model(repr, pod, c.eps_pod, c.eps_train, 'c');
      model.save(rom_path);
      art.r_c[w] = model.rank;
      if (log)
        *log << "[offline " << c.id << "] correction model (window " << w
             << ") rank " << model.rank << " (svd " << pod.seconds << " s)\n";
    }
    art.correction_roms[w] = rom_path;
  }
  art.model_seconds = t_models.seconds();

  std::ofstream txt(odir + "/offline.txt");
  txt << "case " << c.id << "\n";
  txt << "training_points " << art.n_snapshots << " (reused " << art.n_reused
      << ", converged " << art.n_converged << ")\n";
  txt << "window " << c.window << "\n";
  txt << "eps_train " << c.eps_train << "\n";
  txt << "eps_pod " << c.eps_pod << "\n";
  if (needs.primary) txt << "primary_rank " << art.r_p << "\n";
  for (const auto& [w, r] : art.r_c)
    txt << "correction_rank_w" << w << " " << r << "\n";
  txt << "snapshot_seconds " << art.snapshot_seconds << "\n";
  txt << "model_seconds " << art.model_seconds << "\n";
  return art;
}

BenchResult run_online(const BenchmarkCase& c, const std::string& out_root,
                       std::ostream* log) {
  DgSpace space = build_dg_space(c.mesh);
  std::vector<MethodSpec> specs;
  Needs needs = analyze_methods(c, &specs);
  LoadedModels models = load_models(c, offline_dir(out_root, c.id), needs,
                                    c.quad.n(), space.n_dof);

  BenchResult result;
  result.test_set = sample_test_set(c);
  result.summary.case_id = c.id;
  result.details.resize(specs.size());
  for (size_t mi = 0; mi < specs.size(); ++mi)
    result.details[mi].method = specs[mi].label;

  for (int ti = 0; ti < static_cast<int>(result.test_set.size()); ++ti) {
    const Params& mu = result.test_set[ti];
    TransportSystem sys(c.problem, c.mesh, space, c.quad, mu);
    std::optional<DsaOperator> dsa;
    if (needs.dsa) dsa.emplace(sys);
    for (size_t mi = 0; mi < specs.size(); ++mi) {
      auto [rho, report] =
          dispatch(c, specs[mi], sys, dsa ? &*dsa : nullptr, models);
      (void)rho;
      if (log)
        *log << "[online " << c.id << "] test " << ti << " mu="
             << format_params(mu) << " " << specs[mi].label << ": sweeps "
             << report.n_sweep << ", resid " << report.final_residual
             << (report.converged ? "" : " NOT CONVERGED") << "\n"
             << std::flush;
      result.details[mi].params.push_back(mu);
      result.details[mi].reports.push_back(std::move(report));
    }
  }

  double dsa_mean_wall = 0.0;
  for (size_t mi = 0; mi < specs.size(); ++mi) {
    if (specs[mi].label != "DSA") continue;
    for (const auto& r : result.details[mi].reports)
      dsa_mean_wall += r.wall_seconds;
    dsa_mean_wall /= static_cast<double>(result.details[mi].reports.size());
    break;
  }
  result.dsa_mean_wall = dsa_mean_wall;

  for (size_t mi = 0; mi < specs.size(); ++mi) {
    const auto& reports = result.details[mi].reports;
    MetricsRow row;
    row.method = specs[mi].label;
    double wall = 0.0;
    for (const auto& r : reports) {
      row.n_sweep += static_cast<double>(r.n_sweep);
      row.resid = std::max(row.resid, r.final_residual);
      wall += r.wall_seconds;
    }
    row.n_sweep /= static_cast<double>(reports.size());
    wall /= static_cast<double>(reports.size());
    row.t_rel = dsa_mean_wall > 0 ? wall / dsa_mean_wall : 0.0;
    if (specs[mi].needs_primary()) row.r_p = models.primary->rank;
    if (specs[mi].needs_correction())
      row.r_c = models.corrections.at(specs[mi].window).rank;
    result.summary.rows.push_back(std::move(row));
  }
  return result;
}

std::pair<Eigen::VectorXd, SolveReport> run_single(const BenchmarkCase& c,
                                                   const Params& mu,
                                                   const std::string& method,
                                                   const std::string& out_root) {
  if (mu.size() != c.problem.param_ranges.size())
    throw std::invalid_argument(
        "expected " + std::to_string(c.problem.param_ranges.size()) +
        " parameter value(s), got " + std::to_string(mu.size()));
  DgSpace space = build_dg_space(c.mesh);
  MethodSpec spec = parse_method(method);
  Needs needs;
  if (spec.needs_primary()) needs.primary = true;
  if (spec.needs_correction()) {
    if (spec.window > c.window)
      throw std::invalid_argument("method window exceeds the case's training window");
    needs.windows.insert(spec.window);
  }
  LoadedModels models = load_models(c, offline_dir(out_root, c.id), needs,
                                    c.quad.n(), space.n_dof);
  TransportSystem sys(c.problem, c.mesh, space, c.quad, mu);
  std::optional<DsaOperator> dsa;
  if (spec.kind != MethodSpec::Kind::Si && spec.kind != MethodSpec::Kind::Romsa)
    dsa.emplace(sys);
  return dispatch(c, spec, sys, dsa ? &*dsa : nullptr, models);
}

void attach_offline_costs(BenchResult& result, const OfflineArtifacts& art) {
  auto& off = result.summary.offline;
  off.emplace_back("snapshot_seconds", art.snapshot_seconds);
  off.emplace_back("model_seconds", art.model_seconds);
  if (result.dsa_mean_wall > 0) {
    off.emplace_back("snapshot_rel_solve",
                     art.snapshot_seconds / result.dsa_mean_wall);
    off.emplace_back("model_rel_solve",
                     art.model_seconds / result.dsa_mean_wall);
  }
}

std::string write_bench_outputs(const BenchmarkCase& c, const BenchResult& r,
                                const std::string& out_root) {
  const std::string dir = case_dir(out_root, c.id);
  fs::create_directories(dir);
  const std::string summary_path = dir + "/summary.txt";
  {
    std::ofstream out(summary_path);
    out << serialize_summary(r.summary);
  }
  for (const auto& detail : r.details) {
    const std::string mdir = dir + "/" + method_dirname(detail.method);
    fs::create_directories(mdir);
    {
      std::ofstream out(mdir + "/report.txt");
      out << serialize_report(c.id, {detail});
    }
    for (size_t i = 0; i < detail.reports.size(); ++i) {
      std::ofstream out(mdir + "/history_" + std::to_string(i) + ".txt");
      out << serialize_history(detail.reports[i]);
    }
  }
  return summary_path;
}

}  // namespace rte
