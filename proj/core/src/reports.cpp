#include "rte/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rte {

namespace {

constexpr const char* kSummaryHeader = "rte summary v1";
constexpr const char* kReportHeader = "rte report v1";
constexpr const char* kHistoryHeader = "rte history v1";

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_number(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("summary: bad ") + what + " '" + s + "'");
  }
}

bool rel_close(double a, double b, double rel_tol) {
  double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= rel_tol * scale;
}

}  // namespace

std::string serialize_summary(const MetricsTable& table) {
  std::ostringstream out;
  out << kSummaryHeader << "\n";
  out << "case\t" << table.case_id << "\n";
  out << "method\tn_sweep\tt_rel\tresid\tr_p\tr_c\n";
  for (const auto& r : table.rows) {
    out << r.method << '\t' << fmt("%.4f", r.n_sweep) << '\t'
        << fmt("%.3f", r.t_rel) << '\t' << fmt("%.3e", r.resid) << '\t'
        << r.r_p << '\t' << r.r_c << "\n";
  }
  for (const auto& [name, value] : table.offline)
    out << "offline\t" << name << '\t' << fmt("%.6g", value) << "\n";
  return out.str();
}

MetricsTable parse_summary(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader)
    throw std::runtime_error("summary: missing '" + std::string(kSummaryHeader) +
                             "' header");
  if (!std::getline(in, line))
    throw std::runtime_error("summary: missing case line");
  auto case_fields = split_tabs(line);
  if (case_fields.size() != 2 || case_fields[0] != "case")
    throw std::runtime_error("summary: malformed case line '" + line + "'");
  MetricsTable table;
  table.case_id = case_fields[1];
  if (!std::getline(in, line) ||
      line != "method\tn_sweep\tt_rel\tresid\tr_p\tr_c")
    throw std::runtime_error("summary: malformed column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (!f.empty() && f[0] == "offline") {
      if (f.size() != 3)
        throw std::runtime_error("summary: malformed offline line '" + line +
                                 "'");
      table.offline.emplace_back(f[1], parse_number(f[2], "offline value"));
      continue;
    }
    if (f.size() != 6)
      throw std::runtime_error("summary: expected 6 columns, got " +
                               std::to_string(f.size()) + " in '" + line + "'");
    MetricsRow row;
    row.method = f[0];
    row.n_sweep = parse_number(f[1], "n_sweep");
    row.t_rel = parse_number(f[2], "t_rel");
    row.resid = parse_number(f[3], "resid");
    row.r_p = static_cast<int>(parse_number(f[4], "r_p"));
    row.r_c = static_cast<int>(parse_number(f[5], "r_c"));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::string> compare_summaries(const MetricsTable& a,
                                           const MetricsTable& b,
                                           double rel_tol, double resid_floor) {
  std::vector<std::string> diffs;
  if (a.case_id != b.case_id)
    diffs.push_back("case id: '" + a.case_id + "' vs '" + b.case_id + "'");
  if (a.rows.size() != b.rows.size()) {
    diffs.push_back("row count: " + std::to_string(a.rows.size()) + " vs " +
                    std::to_string(b.rows.size()));
    return diffs;
  }
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    const std::string at = "row " + std::to_string(i) + " (" + ra.method + ")";
    if (ra.method != rb.method) {
      diffs.push_back(at + ": method '" + ra.method + "' vs '" + rb.method + "'");
      continue;
    }
    if (!rel_close(ra.n_sweep, rb.n_sweep, rel_tol))
      diffs.push_back(at + ": n_sweep " + fmt("%.4f", ra.n_sweep) + " vs " +
                      fmt("%.4f", rb.n_sweep));
    bool resid_ok = rel_close(ra.resid, rb.resid, rel_tol) ||
                    (ra.resid < resid_floor && rb.resid < resid_floor);
    if (!resid_ok)
      diffs.push_back(at + ": resid " + fmt("%.3e", ra.resid) + " vs " +
                      fmt("%.3e", rb.resid));
    if (ra.r_p != rb.r_p)
      diffs.push_back(at + ": r_p " + std::to_string(ra.r_p) + " vs " +
                      std::to_string(rb.r_p));
    if (ra.r_c != rb.r_c)
      diffs.push_back(at + ": r_c " + std::to_string(ra.r_c) + " vs " +
                      std::to_string(rb.r_c));
  }
  return diffs;
}

std::string serialize_report(const std::string& case_id,
                             const std::vector<MethodDetail>& methods) {
  std::ostringstream out;
  out << kReportHeader << "\n";
  out << "case\t" << case_id << "\n";
  for (const auto& m : methods) {
    out << "\nmethod\t" << m.method << "\n";
    out << "sample\tparams\tn_sweep\titers\tresid\twall_s\tlog\n";
    for (size_t i = 0; i < m.reports.size(); ++i) {
      const auto& r = m.reports[i];
      out << i << '\t';
      const auto& p = m.params[i];
      for (size_t d = 0; d < p.size(); ++d)
        out << (d ? "," : "") << fmt("%.12g", p[d]);
      out << '\t' << r.n_sweep << '\t' << r.iterations << '\t'
          << fmt("%.3e", r.final_residual) << '\t' << fmt("%.3f", r.wall_seconds)
          << '\t' << (r.correction_log.empty() ? "-" : r.correction_log) << "\n";
    }
  }
  return out.str();
}

std::string serialize_history(const SolveReport& report) {
  std::ostringstream out;
  out << kHistoryHeader << "\n";
  out << "strategy\t" << report.strategy << "\n";
  out << "iter\tchange\n";
  for (size_t l = 0; l < report.change_history.size(); ++l)
    out << (l + 1) << '\t' << fmt("%.6e", report.change_history[l]) << "\n";
  return out.str();
}

}  // namespace rte
