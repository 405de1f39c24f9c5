#include "hcat/report.hpp"

#include <cmath>

namespace hcat {

namespace {

// JSON has no inf/nan; keep them visible as strings instead of null.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Json pairs(const std::vector<std::pair<double, double>>& v) {
  Json a = Json::array();
  for (const auto& [x, y] : v) a.push_back(Json::array({number(x), number(y)}));
  return a;
}

template <class T>
Json optional_number(const std::optional<T>& v) {
  return v ? number(*v) : Json(nullptr);
}

const char* endpoint_name(Endpoint e) { return e == Endpoint::Plus ? "+1" : "-1"; }

Json to_json(const PoleCheck& p) {
  Json j;
  j["pole"] = p.endpoint == Endpoint::Plus ? "north" : "south";
  j["excludes"] = p.endpoint == Endpoint::Plus ? "lower" : "upper";
  j["excluded"] = p.excluded;
  j["minorant"] = p.minorant ? to_json(*p.minorant) : Json(nullptr);
  if (p.limit) {
    j["limit_constant"] = {{"value", number(p.limit->ratio_limit)}, {"converged", p.limit->converged}};
  } else {
    j["limit_constant"] = nullptr;
  }
  j["reverify_margin"] = p.minorant && p.limit ? number(p.reverify_margin) : Json(nullptr);
  j["notes"] = p.notes;
  return j;
}

}  // namespace

Json to_json(const IntegratorConfig& cfg, double r0) {
  return Json{{"rel_tol", cfg.rel_tol},
              {"abs_tol", cfg.abs_tol},
              {"x_max", cfg.resolved_x_max(r0)},
              {"max_steps", cfg.max_steps},
              {"dense_spacing", cfg.dense_spacing}};
}

Json to_json(const BranchTermination& t) {
  Json j;
  j["reason"] = to_string(t.reason);
  j["x"] = number(t.where.x);
  j["z"] = number(t.where.z);
  j["nu"] = number(t.where.nu);
  if (!t.detail.empty()) j["detail"] = t.detail;
  return j;
}

Json to_json(const EndClassification& e) {
  Json j;
  j["branch"] = to_string(e.branch);
  j["verdict"] = to_string(e.verdict);
  j["c0"] = optional_number(e.c0);
  j["checkpoints"] = pairs(e.checkpoints);
  j["stability"] = number(e.stability);
  j["height_tail"] = number(e.height_tail);
  j["tail_estimate"] = number(e.tail_estimate);
  j["monotone"] = e.monotone;
  j["first_increase"] = optional_number(e.first_increase);
  j["thresholds"] = {{"c0_min", e.thresholds.c0_min},
                     {"stability_max", e.thresholds.stability_max},
                     {"tail_tol", number(e.tail_tol)}};
  return j;
}

Json to_json(const GrowthFit& g) {
  Json j;
  j["branch"] = to_string(g.branch);
  j["c0"] = number(g.c0);
  j["log_fit"] = {{"slope", number(g.log_fit.slope)},
                  {"intercept", number(g.log_fit.intercept)},
                  {"window", Json::array({number(g.log_fit.x_lo), number(g.log_fit.x_hi)})}};
  j["fit_residual"] = number(g.fit_residual);
  j["remainder"] = pairs(g.remainder);
  return j;
}

Json to_json(const EquivalenceReport& r) {
  Json j;
  j["endpoint"] = endpoint_name(r.endpoint);
  j["ratio_limit"] = number(r.ratio_limit);
  j["converged"] = r.converged;
  j["samples"] = pairs(r.samples);
  Json skipped = Json::array();
  for (double y : r.skipped) skipped.push_back(number(y));
  j["skipped"] = skipped;
  j["bounds"] = {{"M", number(r.bound_low)}, {"M_prime", number(r.bound_high)}};
  return j;
}

Json to_json(const ComparisonReport& r) {
  Json j;
  j["pair"] = {{"h", r.h_spec}, {"f", r.f_spec}};
  j["r0"] = number(r.r0);
  j["hypothesis"] = {{"min_h_minus_f", number(r.hypothesis_margin)}, {"at_y", number(r.hypothesis_argmin)}};
  j["height_ok"] = r.height_ok;
  if (r.derivatives_checked) {
    j["derivative_ok"] = r.derivative_ok;
    j["x0"] = optional_number(r.x0);
    j["lower_derivative_ok"] = r.lower_derivative_ok;
    j["literal_lower_reading_ok"] = r.literal_lower_reading_ok;
  }
  if (r.first_violation) {
    const auto& v = *r.first_violation;
    j["first_violation"] = {{"x", number(v.x)},
                            {"inequality", v.inequality},
                            {"magnitude", number(v.magnitude)},
                            {"numerically_indistinguishable", v.indistinguishable}};
  } else {
    j["first_violation"] = nullptr;
  }
  j["indistinguishable_count"] = r.indistinguishable;
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json::array({number(row.x), number(row.h_upper), number(row.f_upper), number(row.h_upper_slope),
                                number(row.f_upper_slope), number(row.h_lower), number(row.f_lower),
                                number(row.h_lower_slope), number(row.f_lower_slope)}));
  j["columns"] = {"x", "h_upper", "f_upper", "h_upper_slope", "f_upper_slope",
                  "h_lower", "f_lower", "h_lower_slope", "f_lower_slope"};
  j["rows"] = rows;
  return j;
}

Json to_json(const NecksizeReport& r) {
  Json j;
  j["prescription"] = r.h_spec;
  Json items = Json::array();
  for (const auto& row : r.rows)
    items.push_back(Json{{"r0", number(row.r0)}, {"upper", to_json(row.upper)}, {"lower", to_json(row.lower)}});
  j["items"] = items;
  j["upper_agree"] = r.upper_agree;
  j["lower_agree"] = r.lower_agree;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const TransferReport& r) {
  Json j;
  j["pair"] = {{"h", r.h_spec}, {"f", r.f_spec}};
  j["r0"] = number(r.r0);
  Json ends = Json::array();
  for (const auto& e : r.ends) {
    Json ej;
    ej["endpoint"] = endpoint_name(e.endpoint);
    ej["ratio"] = to_json(e.ratio);
    ej["h_verdict"] = to_string(e.h_end.verdict);
    ej["f_verdict"] = to_string(e.f_end.verdict);
    ej["h_c0"] = optional_number(e.h_end.c0);
    ej["f_c0"] = optional_number(e.f_end.c0);
    ej["agree"] = e.agree;
    ej["inconclusive"] = e.inconclusive;
    ends.push_back(ej);
  }
  j["ends"] = ends;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const CoverReport& r) {
  Json j;
  j["window"] = Json::array({number(r.x_lo), number(r.x_hi)});
  j["cover_tol"] = number(r.cover_tol);
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"r0", number(row.r0)},
                        {"sup_upper", number(row.sup_upper)},
                        {"sup_lower", number(row.sup_lower)},
                        {"sup", number(row.sup)},
                        {"argmax", number(row.argmax)}});
  j["rows"] = rows;
  j["strictly_decreasing"] = r.strictly_decreasing;
  j["final_below_tol"] = r.final_below_tol;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const Minorant& m) {
  return Json{{"c", number(m.c)},
              {"alpha", number(m.alpha)},
              {"endpoint", endpoint_name(m.endpoint)},
              {"margin", number(m.margin)},
              {"margin_at", Json::array({number(m.margin_at[0]), number(m.margin_at[1]), number(m.margin_at[2])})}};
}

Json to_json(const HalfSpaceCertificate& c) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["prescription"] = c.prescription;
  j["excluded"] = c.excluded;
  j["minorant_north"] = c.north.minorant ? to_json(*c.north.minorant) : Json(nullptr);
  j["minorant_south"] = c.south.minorant ? to_json(*c.south.minorant) : Json(nullptr);
  j["limit_constants"] = {
      {"C1", c.north.limit ? Json{{"value", number(c.north.limit->ratio_limit)}, {"converged", c.north.limit->converged}}
                           : Json(nullptr)},
      {"C2", c.south.limit ? Json{{"value", number(c.south.limit->ratio_limit)}, {"converged", c.south.limit->converged}}
                           : Json(nullptr)}};
  j["poles"] = Json::array({to_json(c.north), to_json(c.south)});
  j["grid"] = {{"kind", "fibonacci"}, {"nodes_per_hemisphere", c.grid_resolution}, {"seed", 0},
               {"tol_margin", c.tol_margin}, {"label", "grid-verified"}};
  j["verdict_notes"] = c.verdict_notes;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace hcat
