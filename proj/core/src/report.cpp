#include "qcfa/report.hpp"

#include <cmath>
#include <sstream>

#include "qcfa/error.hpp"

namespace qcfa {

Json intervalJson(const Interval& x, int digits) { return Json::array({x.loString(digits), x.hiString(digits)}); }

Json roundJson(const RoundSummary& rs) {
  return Json{{"pReject", intervalJson(rs.pReject)},
              {"pAccept", intervalJson(rs.pAccept)},
              {"pContinue", intervalJson(rs.pContinue)},
              {"eStepsRound", intervalJson(rs.eStepsRound)}};
}

Json loopJson(const LoopResult& lr) {
  return Json{{"PAccept", intervalJson(lr.pAccept)},
              {"ERounds", intervalJson(lr.eRounds)},
              {"ESteps", intervalJson(lr.eSteps)}};
}

Json monteCarloJson(const McEstimate& mc) {
  return Json{{"trials", mc.trials},
              {"seed", std::to_string(mc.seed)},
              {"accepts", mc.accepts},
              {"rejects", mc.rejects},
              {"subSuccesses", mc.subSuccesses},
              {"abandoned", mc.abandoned},
              {"acceptRate", mc.acceptRate},
              {"rejectRate", mc.rejectRate},
              {"subSuccessRate", mc.subSuccessRate},
              {"meanSteps", mc.meanSteps},
              {"confidence95",
               {{"accept", mc.acceptHalfWidth95},
                {"reject", mc.rejectHalfWidth95},
                {"subSuccess", mc.subSuccessHalfWidth95},
                {"meanSteps", mc.meanStepsHalfWidth95}}}};
}

Json planJson(const PadPlan& p) {
  Json j;
  j["family"] = p.family == PadPlan::Family::I ? "I" : "alpha";
  if (p.family == PadPlan::Family::I) {
    j["i"] = p.i;
    j["level"] = std::to_string(p.level);
  } else {
    j["bundle"] = p.bundle;
    j["m"] = std::to_string(p.m);
    j["historyInput"] = std::to_string(p.level);
  }
  Json comps = Json::object();
  for (const auto& [name, len] : p.components) comps[name] = len.toString();
  j["components"] = comps;
  j["n"] = p.n.toString();
  j["rulerIndex"] = p.rulerIndex.toString();
  j["layoutFits"] = p.layoutFits;
  j["feasible"] = p.feasible;
  j["note"] = p.note;
  return j;
}

Json verdictJson(const Verdict& v) {
  return Json{{"shapeOK", v.shapeOK},
              {"wellPadded", v.wellPadded},
              {"prefixPalindrome", v.prefixPalindrome},
              {"member", v.member},
              {"firstViolation", v.firstViolation}};
}

RuntimeFit reportRuntimeFit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) {
    throw InsufficientPoints("runtime fit needs at least 4 size points, got " + std::to_string(points.size()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [x, y] : points) {
    if (x <= 0 || y <= 0) throw PreconditionViolation("runtime fit needs positive sizes and means");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, syy += ly * ly;
  }
  const double vxx = sxx - sx * sx / n, vxy = sxy - sx * sy / n, vyy = syy - sy * sy / n;
  if (vxx <= 0) throw PreconditionViolation("runtime fit needs at least two distinct sizes");
  RuntimeFit f;
  f.points = points.size();
  f.exponent = vxy / vxx;
  f.intercept = (sy - f.exponent * sx) / n;
  // A flat series is fit perfectly by slope 0.
  f.r2 = vyy <= 1e-300 ? 1.0 : (vxy * vxy) / (vxx * vyy);
  return f;
}

RuntimeFit reportRuntimeFit(std::string_view csv, const std::string& xColumn, const std::string& yColumn) {
  std::istringstream in{std::string(csv)};
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  // Comment lines carry the run header.
  while (std::getline(in, line) && (line.empty() || line.front() == '#')) {
  }
  const auto header = split(line);
  std::ptrdiff_t xi = -1, yi = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == xColumn) xi = static_cast<std::ptrdiff_t>(i);
    if (header[i] == yColumn) yi = static_cast<std::ptrdiff_t>(i);
  }
  if (xi < 0 || yi < 0) throw FormatError("CSV lacks column '" + (xi < 0 ? xColumn : yColumn) + "'");
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() <= static_cast<std::size_t>(std::max(xi, yi))) throw FormatError("short CSV row: " + line);
    pts.emplace_back(std::stod(cells[static_cast<std::size_t>(xi)]), std::stod(cells[static_cast<std::size_t>(yi)]));
  }
  return reportRuntimeFit(pts);
}

}  // namespace qcfa
