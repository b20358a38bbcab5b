// Command-line driver for the parametric transport benchmark suite.
//
//   rte list                         enumerate benchmark cases
//   rte offline  --case ID ...      collect snapshots, build reduced models
//   rte bench    --case ID ...      offline (reusing artifacts) + online table
//   rte solve    --case ID --method M --mu "a,b" ...   one parameter value
//   rte compare  A B                 diff two summary files
//
// Options may also come from a config file (--config PATH) in the versioned
// key = value format:
//
//   rteconfig v1
//   case = cross_regime        # benchmark case id
//   scale = full               # full | half
//   out = bench_out            # artifact/output root directory
//   eps_pod = 1e-9             # basis truncation tolerance
//   eps_sisa = 1e-11           # online stopping tolerance
//   eps_train = 1e-11          # training stopping tolerance
//   gmres_rel_tol = 1e-11      # GMRES relative residual tolerance
//   n_test = 20                # test-set size
//   seed = 20260814            # test-set sampling seed
//   window = 3                 # training window (kept iterates per point)
//   theta = 3                  # hybrid switch depth
//   methods = SI-DSA; SI-ROMSAD(3,3)   # semicolon-separated method list
//
// Explicit command-line flags override config-file values, which override
// the case defaults.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rte/cases.hpp"
#include "rte/config.hpp"
#include "rte/dg_space.hpp"
#include "rte/reports.hpp"
#include "rte/runner.hpp"

namespace {

struct CaseOpts {
  std::string case_id;
  std::string scale;
  std::string out;
  std::string config_path;
  double eps_pod = 0;
  double eps_sisa = 0;
  double eps_train = 0;
  double gmres_rel_tol = 0;
  long n_test = 0;
  unsigned long long seed = 0;
  long window = 0;
  long theta = 0;
  std::string methods;
  bool quiet = false;
};

void add_case_options(CLI::App* cmd, CaseOpts& o, bool need_case) {
  auto* c = cmd->add_option("--case", o.case_id, "benchmark case id");
  if (need_case) c->check(CLI::IsMember(rte::case_ids()));
  cmd->add_option("--scale", o.scale, "full | half (default full)")
      ->check(CLI::IsMember({"full", "half"}));
  cmd->add_option("--out", o.out, "artifact/output root (default bench_out)");
  cmd->add_option("--config", o.config_path, "config file (rteconfig v1)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--eps-pod", o.eps_pod, "basis truncation tolerance");
  cmd->add_option("--eps-sisa", o.eps_sisa, "online stopping tolerance");
  cmd->add_option("--eps-train", o.eps_train, "training stopping tolerance");
  cmd->add_option("--gmres-rel-tol", o.gmres_rel_tol,
                  "GMRES relative residual tolerance");
  cmd->add_option("--n-test", o.n_test, "test-set size");
  cmd->add_option("--seed", o.seed, "test-set sampling seed");
  cmd->add_option("--window", o.window, "training window");
  cmd->add_option("--theta", o.theta, "hybrid switch depth");
  cmd->add_option("--methods", o.methods,
                  "semicolon-separated method list, e.g. 'SI-DSA; SI-ROMIG'");
  cmd->add_flag("--quiet", o.quiet, "suppress progress logging");
}

std::vector<std::string> split_methods(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ';')) {
    size_t a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    size_t b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  if (out.empty()) throw std::runtime_error("empty method list");
  return out;
}

//! Resolve defaults < config file < explicit flags into one case definition.
rte::BenchmarkCase resolve_case(const CLI::App* cmd, CaseOpts& o) {
  rte::KvConfig cfg;
  if (!o.config_path.empty()) cfg = rte::KvConfig::load(o.config_path);

  auto from_cli = [&](const char* flag) { return cmd->count(flag) > 0; };

  std::string case_id = o.case_id;
  if (case_id.empty() && cfg.has("case")) case_id = cfg.get("case");
  if (case_id.empty())
    throw std::runtime_error("no case selected (--case or config 'case')");

  std::string scale = from_cli("--scale") ? o.scale
                      : cfg.has("scale")  ? cfg.get("scale")
                                          : "full";
  if (scale != "full" && scale != "half")
    throw std::runtime_error("scale must be 'full' or 'half', got '" + scale +
                             "'");
  rte::BenchmarkCase c = rte::define_case(
      case_id, scale == "half" ? rte::CaseScale::Half : rte::CaseScale::Full);

  auto num = [&](const char* flag, const char* key, double cli_value,
                 double current) {
    if (from_cli(flag)) return cli_value;
    return cfg.get_double(key, current);
  };
  c.eps_pod = num("--eps-pod", "eps_pod", o.eps_pod, c.eps_pod);
  c.eps_sisa = num("--eps-sisa", "eps_sisa", o.eps_sisa, c.eps_sisa);
  c.eps_train = num("--eps-train", "eps_train", o.eps_train, c.eps_train);
  c.gmres_rel_tol =
      num("--gmres-rel-tol", "gmres_rel_tol", o.gmres_rel_tol, c.gmres_rel_tol);
  c.n_test = static_cast<int>(
      num("--n-test", "n_test", static_cast<double>(o.n_test), c.n_test));
  if (from_cli("--seed"))
    c.seed = o.seed;
  else if (cfg.has("seed"))
    c.seed = static_cast<unsigned long long>(
        cfg.get_long("seed", static_cast<long>(c.seed)));
  c.window = static_cast<int>(
      num("--window", "window", static_cast<double>(o.window), c.window));
  c.theta = static_cast<int>(
      num("--theta", "theta", static_cast<double>(o.theta), c.theta));
  if (from_cli("--methods"))
    c.methods = split_methods(o.methods);
  else if (cfg.has("methods"))
    c.methods = split_methods(cfg.get("methods"));
  return c;
}

std::string out_root(const CLI::App* cmd, const CaseOpts& o) {
  if (cmd->count("--out") > 0) return o.out;
  if (!o.config_path.empty()) {
    rte::KvConfig cfg = rte::KvConfig::load(o.config_path);
    if (cfg.has("out")) return cfg.get("out");
  }
  return "bench_out";
}

std::vector<double> parse_mu(const std::string& text) {
  std::vector<double> mu;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    size_t pos = 0;
    mu.push_back(std::stod(item, &pos));
    if (pos != item.size())
      throw std::runtime_error("bad parameter value '" + item + "'");
  }
  if (mu.empty()) throw std::runtime_error("empty parameter value");
  return mu;
}

int cmd_list() {
  for (const auto& id : rte::case_ids()) {
    rte::BenchmarkCase c = rte::define_case(id);
    std::printf("%-22s %s, %ld cells, %d directions, %zu training points\n",
                id.c_str(),
                c.problem.geometry == rte::Geometry::Slab1D ? "slab" : "xy",
                static_cast<long>(c.mesh.cell_count()), c.quad.n(),
                c.train.size());
    std::printf("%-22s   methods:", "");
    for (const auto& m : c.methods) std::printf(" %s", m.c_str());
    std::printf("\n");
  }
  return 0;
}

int cmd_offline(const CLI::App* cmd, CaseOpts& o) {
  rte::BenchmarkCase c = resolve_case(cmd, o);
  rte::OfflineArtifacts art =
      rte::run_offline(c, out_root(cmd, o), o.quiet ? nullptr : &std::cerr);
  std::printf("offline artifacts in %s\n", art.dir.c_str());
  std::printf("  training points: %d (%d reused, %d converged)\n",
              art.n_snapshots, art.n_reused, art.n_converged);
  if (!art.primary_rom.empty()) std::printf("  primary rank: %d\n", art.r_p);
  for (const auto& [w, r] : art.r_c)
    std::printf("  correction rank (window %d): %d\n", w, r);
  std::printf("  %.2f s snapshots, %.2f s models\n", art.snapshot_seconds,
              art.model_seconds);
  return 0;
}

int cmd_bench(const CLI::App* cmd, CaseOpts& o) {
  rte::BenchmarkCase c = resolve_case(cmd, o);
  std::ostream* log = o.quiet ? nullptr : &std::cerr;
  const std::string root = out_root(cmd, o);
  rte::OfflineArtifacts art = rte::run_offline(c, root, log);
  rte::BenchResult res = rte::run_online(c, root, log);
  rte::attach_offline_costs(res, art);
  std::string path = rte::write_bench_outputs(c, res, root);
  std::fputs(rte::serialize_summary(res.summary).c_str(), stdout);
  std::fprintf(stderr, "wrote %s\n", path.c_str());
  return 0;
}

int cmd_solve(const CLI::App* cmd, CaseOpts& o, const std::string& method,
              const std::string& mu_text, const std::string& solution_path,
              const std::string& history_path) {
  rte::BenchmarkCase c = resolve_case(cmd, o);
  std::vector<double> mu = parse_mu(mu_text);
  auto [rho, report] = rte::run_single(c, mu, method, out_root(cmd, o));
  std::printf("%s at mu=%s: %s\n", report.strategy.c_str(), mu_text.c_str(),
              report.converged ? "converged" : "NOT CONVERGED");
  std::printf("  sweeps %ld, iterations %d, residual %.3e, %.3f s\n",
              report.n_sweep, report.iterations, report.final_residual,
              report.wall_seconds);
  if (!report.correction_log.empty())
    std::printf("  corrections %s\n", report.correction_log.c_str());
  if (!history_path.empty()) {
    std::ofstream out(history_path);
    out << rte::serialize_history(report);
  }
  if (!solution_path.empty()) {
    rte::DgSpace space = rte::build_dg_space(c.mesh);
    Eigen::VectorXd avg = rte::cell_averages(c.mesh, space, rho);
    std::ofstream out(solution_path);
    out << "rte solution v1\n";
    if (c.problem.geometry == rte::Geometry::Slab1D) {
      out << "x\trho\n";
      for (int i = 0; i < c.mesh.nx; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.8e\t%.8e\n", c.mesh.center(i),
                      avg[i]);
        out << buf;
      }
    } else {
      out << "x\ty\trho\n";
      for (int iy = 0; iy < c.mesh.ny; ++iy)
        for (int ix = 0; ix < c.mesh.nx; ++ix) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "%.8e\t%.8e\t%.8e\n",
                        c.mesh.cell_x0(ix) + 0.5 * c.mesh.hx(),
                        c.mesh.cell_y0(iy) + 0.5 * c.mesh.hy(),
                        avg[ix + static_cast<long>(c.mesh.nx) * iy]);
          out << buf;
        }
    }
  }
  return report.converged ? 0 : 2;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                double rel_tol) {
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  rte::MetricsTable a = rte::parse_summary(slurp(a_path));
  rte::MetricsTable b = rte::parse_summary(slurp(b_path));
  auto diffs = rte::compare_summaries(a, b, rel_tol);
  if (diffs.empty()) {
    std::printf("summaries match (%zu rows)\n", a.rows.size());
    return 0;
  }
  for (const auto& d : diffs) std::printf("DIFF %s\n", d.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parametric radiative-transfer benchmark driver"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "enumerate benchmark cases");

  CaseOpts off_opts;
  auto* offline = app.add_subcommand(
      "offline", "collect training snapshots and build reduced models");
  add_case_options(offline, off_opts, true);

  CaseOpts bench_opts;
  auto* bench = app.add_subcommand(
      "bench", "run the offline stage (reusing artifacts) and the online table");
  add_case_options(bench, bench_opts, true);

  CaseOpts solve_opts;
  std::string method = "SI-DSA", mu_text, solution_path, history_path;
  auto* solve =
      app.add_subcommand("solve", "solve one parameter value with one method");
  add_case_options(solve, solve_opts, true);
  solve->add_option("--method", method,
                    "SI | SI-DSA | SI-ROMIG | SI-ROMSA(w) | SI-ROMSAD(w,t) | "
                    "PGMRES | PGMRES-ROMIG");
  solve->add_option("--mu", mu_text, "parameter value(s), comma-separated")
      ->required();
  solve->add_option("--solution", solution_path,
                    "write cell-averaged density to this file");
  solve->add_option("--history", history_path,
                    "write the iteration history to this file");

  std::string cmp_a, cmp_b;
  double cmp_rel_tol = 1e-9;
  auto* compare =
      app.add_subcommand("compare", "diff two summary files (ignores timings)");
  compare->add_option("a", cmp_a, "first summary file")->required();
  compare->add_option("b", cmp_b, "second summary file")->required();
  compare->add_option("--rel-tol", cmp_rel_tol, "relative tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return cmd_list();
    if (offline->parsed()) return cmd_offline(offline, off_opts);
    if (bench->parsed()) return cmd_bench(bench, bench_opts);
    if (solve->parsed())
      return cmd_solve(solve, solve_opts, method, mu_text, solution_path,
                       history_path);
    if (compare->parsed()) return cmd_compare(cmp_a, cmp_b, cmp_rel_tol);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
