#pragma once

#include "choquard/config.hpp"

#include <string>
#include <vector>

namespace choquard {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  bool all_pass() const;
};

// Runs the property checks 1-10 against cfg. The only suite is "fast".
VerifyReport run_verify(const RunConfig& cfg, const std::string& suite = "fast");

} // namespace choquard
