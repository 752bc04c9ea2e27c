#include "jobfit/report_json.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace jobfit {
namespace {

Json check_json(const PhaseCheck& c) {
  Json j{{"mu", c.mu}, {"in_domain", c.in_domain}, {"passed", c.passed}};
  if (c.in_domain) j["p"] = to_json(c.p);
  return j;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

Json to_json(const SimEstimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"ci_lo", e.ci_lo},
          {"ci_hi", e.ci_hi}, {"trials", e.trials},    {"seed", e.seed}};
}

Json to_json(const PhaseReport& r) {
  return {{"mu1_c", r.mu1_c},
          {"gamma1", number_or_null(r.gamma1)},
          {"L", r.L},
          {"min_der", r.min_der},
          {"max_disp", r.max_disp},
          {"max_disp_convention", to_string(r.convention)},
          {"theta", r.theta},
          {"closed_form", r.closed_form},
          {"verified", {{"ok", r.verified}, {"low", check_json(r.low)}, {"high", check_json(r.high)}}}};
}

Json to_json(const MergeReport& r) {
  return {{"workers",
           {{"w1", {{"mu1", r.mu1_w1}, {"mu2", r.mu2_w1}}}, {"w2", {{"mu1", r.mu1_w2}, {"mu2", r.mu2_w2}}}}},
          {"gamma1_w1", number_or_null(r.gamma1_w1)},
          {"gamma1_w2", number_or_null(r.gamma1_w2)},
          {"err_avg_low", number_or_null(r.err_avg_low)},
          {"err_avg_high", number_or_null(r.err_avg_high)},
          {"condition_holds", r.condition_holds},
          {"guaranteed_gain", r.guaranteed_gain},
          {"P1", to_json(r.p1)},
          {"P2", to_json(r.p2)},
          {"P12", to_json(r.p12)},
          {"P21", to_json(r.p21)},
          {"delta", r.delta}};
}

Json to_json(const CompressionReport& r) {
  return {{"P1", to_json(r.p1)},
          {"P2", to_json(r.p2)},
          {"P1_merged", to_json(r.p1_merged)},
          {"P2_merged", to_json(r.p2_merged)},
          {"PC", r.pc},
          {"hypothesis_holds", r.hypothesis_holds},
          {"condition_holds", r.condition_holds},
          {"guaranteed_pc", r.guaranteed_pc},
          {"gamma2", {{"low", number_or_null(r.gamma2_low)},
                      {"high", number_or_null(r.gamma2_high)},
                      {"ai", number_or_null(r.gamma2_ai)}}}};
}

Json to_json(const MergePlan& plan) {
  auto names = [](const std::vector<Source>& v) {
    Json a = Json::array();
    for (Source s : v) a.push_back(to_string(s));
    return a;
  };
  return {{"strategy", to_string(plan.strategy)},
          {"trust", plan.trust},
          {"decision_assignment", names(plan.decision)},
          {"action_assignment", names(plan.action)}};
}

Json to_json(const Heatmap& h, Knob x, Knob y) {
  Json p = Json::array(), se = Json::array();
  for (const auto& c : h.cells) {
    p.push_back(c.value);
    se.push_back(c.std_error);
  }
  return {{"x", {{"param", to_string(x)}, {"values", h.x}}},
          {"y", {{"param", to_string(y)}, {"values", h.y}}},
          {"layout", "row-major over (y, x)"},
          {"p_hat", p},
          {"stderr", se},
          {"trials", h.cells.empty() ? 0 : h.cells.front().trials},
          {"seed", h.cells.empty() ? 0 : h.cells.front().seed}};
}

std::string sweep_csv(Knob knob, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "param,value,p_hat,stderr,ci_lo,ci_hi,trials,seed\n";
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    out << to_string(knob) << ',' << format_number(r.value) << ',' << format_number(e.value) << ','
        << format_number(e.std_error) << ',' << format_number(e.ci_lo) << ',' << format_number(e.ci_hi) << ','
        << e.trials << ',' << e.seed << '\n';
  }
  return out.str();
}

}  // namespace jobfit
