#pragma once

#include "xtal/common.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace xtal {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::json detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  Real alpha = 0.05;
  std::uint64_t seed = 20240601;
  std::vector<int> only;  // empty: all criteria
  std::vector<int> determinism_threads{1, 4};
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  std::size_t passed_count() const;
  bool all_passed() const { return passed_count() == criteria.size(); }
};

inline constexpr int kCriterionCount = 18;

std::string criterion_name(int id);
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
AcceptanceReport run_acceptance(const AcceptanceOptions& opts = {});

/// Report JSON; timings are left out unless requested so repeated runs compare byte for byte.
nlohmann::json to_json(const AcceptanceReport& r, bool timings = false);
/// One "PASS"/"FAIL" line per criterion.
std::string summary_lines(const AcceptanceReport& r);

}  // namespace xtal
