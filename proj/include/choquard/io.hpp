#pragma once

// Machine-readable outputs. JSON documents embed the resolved config; CSV
// files put the header on the first line followed by '#' comment lines.

#include "choquard/config.hpp"
#include "choquard/extremal.hpp"
#include "choquard/fibering.hpp"
#include "choquard/solver.hpp"

#include <string>
#include <vector>

namespace choquard {

std::string extremal_to_json(const ExtremalResult& result, const RunConfig& cfg);
std::string solution_to_json(const Solution& sol, const RunConfig& cfg);

// lambda,E1,E2,sign_E2,norm_u,norm_v,iter_u,iter_v,residual_u,residual_v;
// failed branches are written as nan with iteration count -1.
std::string sweep_to_csv(const BranchDiagram& diagram, const RunConfig& cfg);

struct FiberingTable {
  FiberAnalysis analysis;
  double t_zero = 0.0;
  std::vector<double> t;
  std::vector<double> qn;
  std::vector<double> qe;
  // Set when the requested range reached outside (0, t_zero].
  bool clipped = false;
};

// samples points, equally spaced on [t_min, t_max] after clipping to (0, t_zero].
// t_max <= 0 means t_zero, t_min <= 0 means t_max / samples.
FiberingTable fibering_table(const Field& u, const Model& model, double t_min, double t_max, int samples);
std::string fibering_to_csv(const FiberingTable& table, const RunConfig& cfg);

void write_file(const std::string& path, const std::string& contents);

} // namespace choquard
