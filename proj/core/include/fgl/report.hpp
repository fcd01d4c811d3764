#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fgl/linalg.hpp"

namespace fgl {

/// The three normalized KKT violations shared by rPPA and ADMM.
struct KktResidual {
  double prox = 0.0;         // ||Theta - Prox_P(Theta + .)|| / (1 + ||Theta||)
  double feasibility = 0.0;  // primal or linear-constraint violation
  double inverse = 0.0;      // max_l ||A^(l) X^(l) - I|| / (1 + sqrt(p))

  double max() const;
};

/// One line of a solver trace. ADMM leaves the inner counts at zero.
struct OuterRecord {
  int iteration = 0;
  double sigma = 0.0;
  double eta = 0.0;
  int inner_iterations = 0;
  int cg_iterations = 0;
  double objective = 0.0;
  double seconds = 0.0;
};

struct SolverReport {
  std::string solver;
  MatrixCollection Theta;
  MatrixCollection Omega;
  MatrixCollection X;
  MatrixCollection Z;  // ADMM only
  double eta = 0.0;    // eta_P for rPPA, eta_A for ADMM
  KktResidual kkt;
  double objective = 0.0;
  int outer_iterations = 0;
  int total_newton = 0;
  int total_cg = 0;
  int warm_start_iterations = 0;
  int max_newton_per_outer = 0;
  double seconds = 0.0;
  bool converged = false;
  std::vector<OuterRecord> trace;
};

/// Relative objective difference (a - b) / (1 + |a| + |b|).
double relative_objective_gap(double a, double b);

/// Seconds as h:m:s, e.g. 01:02:03.5 or 07.25 for short runs.
std::string format_hms(double seconds);

void write_trace_text(std::ostream& out, const SolverReport& r);
void write_trace_jsonl(std::ostream& out, const SolverReport& r);

/// Flat "key=value" summary of a report (no matrices).
void write_report_record(std::ostream& out, const SolverReport& r);

}  // namespace fgl
