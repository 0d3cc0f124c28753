#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcfa/engine.hpp"
#include "qcfa/padlang.hpp"

namespace qcfa {

using Json = nlohmann::ordered_json;

// Interval endpoints as decimal strings, rounded outward.
Json intervalJson(const Interval& x, int digits = 20);
Json roundJson(const RoundSummary& rs);
Json loopJson(const LoopResult& lr);
Json monteCarloJson(const McEstimate& mc);
Json planJson(const PadPlan& p);
Json verdictJson(const Verdict& v);

struct RuntimeFit {
  double exponent = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points = 0;
};

// Least-squares line through (log x, log y). Needs at least 4 points.
RuntimeFit reportRuntimeFit(const std::vector<std::pair<double, double>>& points);
// Same, reading two named columns from CSV text with a header row.
RuntimeFit reportRuntimeFit(std::string_view csv, const std::string& xColumn = "size",
                            const std::string& yColumn = "mean_steps");

}  // namespace qcfa
