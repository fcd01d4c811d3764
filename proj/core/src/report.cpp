#include "fgl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace fgl {

double KktResidual::max() const { return std::max({prox, feasibility, inverse}); }

double relative_objective_gap(double a, double b) { return (a - b) / (1.0 + std::abs(a) + std::abs(b)); }

std::string format_hms(double seconds) {
  if (!(seconds >= 0.0)) seconds = 0.0;
  const auto total = static_cast<long>(seconds);
  const long h = total / 3600;
  const long m = (total % 3600) / 60;
  const double s = seconds - static_cast<double>(h * 3600 + m * 60);
  char buf[64];
  if (h > 0)
    std::snprintf(buf, sizeof buf, "%02ld:%02ld:%05.2f", h, m, s);
  else if (m > 0)
    std::snprintf(buf, sizeof buf, "%02ld:%05.2f", m, s);
  else
    std::snprintf(buf, sizeof buf, "%05.2f", s);
  return buf;
}

void write_trace_text(std::ostream& out, const SolverReport& r) {
  out << "# solver=" << r.solver << '\n';
  out << "#    k        sigma          eta  inner     cg            objective      time\n";
  for (const auto& t : r.trace) {
    char line[160];
    std::snprintf(line, sizeof line, "%6d %12.4e %12.4e %6d %6d %20.12e %9s\n", t.iteration, t.sigma,
                  t.eta, t.inner_iterations, t.cg_iterations, t.objective, format_hms(t.seconds).c_str());
    out << line;
  }
}

void write_trace_jsonl(std::ostream& out, const SolverReport& r) {
  for (const auto& t : r.trace) {
    nlohmann::json j = {{"solver", r.solver},
                        {"k", t.iteration},
                        {"sigma", t.sigma},
                        {"eta", t.eta},
                        {"inner", t.inner_iterations},
                        {"cg", t.cg_iterations},
                        {"objective", std::isfinite(t.objective) ? nlohmann::json(t.objective) : nlohmann::json("inf")},
                        {"seconds", t.seconds}};
    out << j.dump() << '\n';
  }
}

void write_report_record(std::ostream& out, const SolverReport& r) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "solver=" << r.solver << '\n'
      << "converged=" << (r.converged ? 1 : 0) << '\n'
      << "eta=" << r.eta << '\n'
      << "kkt_prox=" << r.kkt.prox << '\n'
      << "kkt_feasibility=" << r.kkt.feasibility << '\n'
      << "kkt_inverse=" << r.kkt.inverse << '\n'
      << "objective=" << r.objective << '\n'
      << "outer_iterations=" << r.outer_iterations << '\n'
      << "total_newton=" << r.total_newton << '\n'
      << "total_cg=" << r.total_cg << '\n'
      << "warm_start_iterations=" << r.warm_start_iterations << '\n'
      << "seconds=" << r.seconds << '\n';
}

}  // namespace fgl
