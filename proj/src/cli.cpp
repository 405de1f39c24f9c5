#include "hcat/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "hcat/asymptotics.hpp"
#include "hcat/comparison.hpp"
#include "hcat/expression.hpp"
#include "hcat/profile.hpp"
#include "hcat/report.hpp"

namespace hcat {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A property check ran and failed; the report has already been written.
struct CheckFailed {};

double parse_number(std::string_view text, std::size_t offset) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || text.empty())
    throw ParseError("expected a number, got '" + std::string(text) + "'", offset);
  return v;
}

PrescribedFunction parse_at(std::string_view spec, std::size_t offset) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("prescription needs a kind prefix (powerlaw:, expr:, table:, scale:)", offset);
  const auto kind = spec.substr(0, colon);
  const auto rest = spec.substr(colon + 1);
  const std::size_t rest_at = offset + colon + 1;
  if (kind == "powerlaw") {
    constexpr std::string_view key = "alpha=";
    if (rest.substr(0, key.size()) != key) throw ParseError("expected 'alpha='", rest_at);
    const double alpha = parse_number(rest.substr(key.size()), rest_at + key.size());
    if (!(alpha > 0.0)) throw ParseError("alpha must be positive", rest_at + key.size());
    return power_law(alpha);
  }
  if (kind == "expr") {
    try {
      return parsed_expression(rest);
    } catch (const ParseError& e) {
      throw ParseError("expression: " + e.message(), rest_at + e.position());
    }
  }
  if (kind == "table") {
    if (rest.empty()) throw ParseError("table needs a path", rest_at);
    return load_table(std::string(rest));
  }
  if (kind == "scale") {
    const auto second = rest.find(':');
    if (second == std::string_view::npos) throw ParseError("expected scale:<factor>:<spec>", rest_at);
    const double factor = parse_number(rest.substr(0, second), rest_at);
    if (factor == 0.0 || !std::isfinite(factor)) throw ParseError("scale factor must be nonzero", rest_at);
    return scaled(parse_at(rest.substr(second + 1), rest_at + second + 1), factor);
  }
  throw ParseError("unknown prescription kind '" + std::string(kind) + "'", offset);
}

IntegratorConfig integrator(const RunConfig& cfg, double r0) {
  IntegratorConfig ic;
  ic.rel_tol = cfg.rel_tol;
  ic.abs_tol = cfg.abs_tol;
  if (cfg.x_max) {
    if (!(*cfg.x_max > r0)) throw UsageError("--xmax must exceed the necksize " + format_double(r0));
    ic.x_max = *cfg.x_max;
  }
  return ic;
}

std::vector<Branch> branches(const RunConfig& cfg) {
  if (cfg.branch == "upper") return {Branch::Upper};
  if (cfg.branch == "lower") return {Branch::Lower};
  return {Branch::Upper, Branch::Lower};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

void warn_terminations(const Catenoid& c, std::ostream& err) {
  for (Branch b : {Branch::Upper, Branch::Lower}) {
    const auto& t = c.termination(b);
    if (t.reason != Termination::ReachedXMax)
      err << "warning: " << to_string(b) << " branch stopped (" << to_string(t.reason) << ") at x=" << format_double(t.where.x)
          << (t.detail.empty() ? "" : ": " + t.detail) << '\n';
  }
}

Json classify_catenoid(const Catenoid& c, const std::vector<Branch>& which) {
  Json ends = Json::array();
  for (Branch b : which) {
    const auto e = classify_end(c, b);
    Json j = to_json(e);
    if (e.verdict == Verdict::Unbounded) j["growth"] = to_json(estimate_c0(c, b));
    j["termination"] = to_json(c.termination(b));
    ends.push_back(j);
  }
  return ends;
}

Json header(const char* command) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  return j;
}

int cmd_profile(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto h = parse_prescription(cfg.h_spec);
  const auto c = integrate_catenoid(h, cfg.r0, integrator(cfg, cfg.r0));
  warn_terminations(c, err);
  write_profile_csv(out, c, branches(cfg));
  return kExitOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto h = parse_prescription(cfg.h_spec);
  const auto ic = integrator(cfg, cfg.r0);
  const auto c = integrate_catenoid(h, cfg.r0, ic);
  Json j = header("classify");
  j["prescription"] = cfg.h_spec;
  j["r0"] = cfg.r0;
  j["integrator"] = to_json(ic, cfg.r0);
  j["ends"] = classify_catenoid(c, branches(cfg));
  out << dump(j);
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto h = parse_prescription(cfg.h_spec);
  const auto f = parse_prescription(cfg.f_spec);
  const auto ic = integrator(cfg, cfg.r0);
  std::optional<std::vector<double>> grid;
  if (cfg.window) grid = comparison_grid(cfg.r0, cfg.window->second);
  const auto rep = compare_derivatives(h, f, cfg.r0, cfg.window ? std::optional(cfg.window->first) : std::nullopt,
                                       grid, ic);
  if (cfg.format == "csv") {
    write_comparison_csv(out, rep);
  } else {
    Json j = header("compare");
    j["integrator"] = to_json(ic, cfg.r0);
    j["report"] = to_json(rep);
    j["report"]["pair"] = {{"h", cfg.h_spec}, {"f", cfg.f_spec}};
    out << dump(j);
  }
  if (!rep.height_ok || !rep.derivative_ok) throw CheckFailed{};
  return kExitOk;
}

int cmd_equiv(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto h = parse_prescription(cfg.h_spec);
  const auto f = parse_prescription(cfg.f_spec);
  std::vector<Endpoint> ends;
  for (Branch b : branches(cfg)) ends.push_back(b == Branch::Upper ? Endpoint::Plus : Endpoint::Minus);
  const auto ic = integrator(cfg, cfg.r0);
  const auto rep = equivalence_behavior(h, f, cfg.r0, ends, ic);
  Json j = header("equiv");
  j["integrator"] = to_json(ic, cfg.r0);
  j["report"] = to_json(rep);
  j["report"]["pair"] = {{"h", cfg.h_spec}, {"f", cfg.f_spec}};
  out << dump(j);
  if (!rep.pass) throw CheckFailed{};
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto hs = parse_sphere(cfg.h_spec);
  auto cert = certify(hs);
  cert.prescription = cfg.h_spec;
  out << dump(to_json(cert));
  return kExitOk;
}

int cmd_mesh(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto h = parse_prescription(cfg.h_spec);
  RunConfig local = cfg;
  if (!local.x_max) local.x_max = 10.0 * cfg.r0;
  const auto c = integrate_catenoid(h, cfg.r0, integrator(local, cfg.r0));
  warn_terminations(c, err);
  write_obj(out, mesh(c, cfg.rings, cfg.segments));
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto h = parse_prescription(cfg.h_spec);
  require(!cfg.r_list.empty(), "sweep needs --r-list");
  for (double r : cfg.r_list) require(r > 0.0 && std::isfinite(r), "--r-list entries must be positive");
  const auto which = branches(cfg);
  std::vector<Json> items(cfg.r_list.size());
  std::vector<std::string> errors(cfg.r_list.size());
  std::vector<std::map<Branch, Verdict>> verdicts(cfg.r_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < items.size();) {
      const double r = cfg.r_list[i];
      try {
        const auto c = integrate_catenoid(h, r, integrator(cfg, r));
        Json item;
        item["r0"] = r;
        item["ends"] = classify_catenoid(c, which);
        for (const auto& e : item["ends"]) {
          const Branch b = e["branch"] == "upper" ? Branch::Upper : Branch::Lower;
          const std::string v = e["verdict"];
          verdicts[i][b] = v == "Unbounded" ? Verdict::Unbounded : v == "Bounded" ? Verdict::Bounded : Verdict::Inconclusive;
        }
        items[i] = std::move(item);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(items.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw std::runtime_error("r0=" + format_double(cfg.r_list[i]) + ": " + errors[i]);

  Json j = header("sweep");
  j["prescription"] = cfg.h_spec;
  j["integrator"] = to_json(integrator(cfg, cfg.r_list.front()), cfg.r_list.front());
  j["integrator"].erase("x_max");
  j["integrator"]["x_max"] = cfg.x_max ? Json(*cfg.x_max) : Json("1e6 * r0");
  j["items"] = items;
  Json agree;
  bool pass = true;
  for (Branch b : which) {
    std::optional<Verdict> seen;
    bool ok = true;
    for (const auto& v : verdicts) {
      const Verdict x = v.at(b);
      if (x == Verdict::Inconclusive) continue;
      if (seen && *seen != x) ok = false;
      seen = x;
    }
    agree[to_string(b)] = ok;
    pass = pass && ok;
  }
  j["verdicts_agree"] = agree;
  j["pass"] = pass;
  out << dump(j);
  if (!pass) throw CheckFailed{};
  return kExitOk;
}

}  // namespace

PrescribedFunction parse_prescription(std::string_view spec) { return parse_at(spec, 0); }

SphereFunction parse_sphere(std::string_view spec) {
  constexpr std::string_view prefix = "sphere:";
  if (spec.substr(0, prefix.size()) == prefix) {
    try {
      return SphereFunction::parse(spec.substr(prefix.size()));
    } catch (const ParseError& e) {
      throw ParseError("expression: " + e.message(), prefix.size() + e.position());
    }
  }
  return SphereFunction::axisymmetric(parse_prescription(spec));
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&, std::ostream&)>> commands = {
      {"profile", cmd_profile}, {"classify", cmd_classify}, {"compare", cmd_compare}, {"equiv", cmd_equiv},
      {"certify", cmd_certify}, {"mesh", cmd_mesh},         {"sweep", cmd_sweep}};
  try {
    const auto it = commands.find(cfg.subcommand);
    require(it != commands.end(), "unknown subcommand '" + cfg.subcommand + "'");
    require(!cfg.h_spec.empty(), "--h is required");
    require((cfg.subcommand != "compare" && cfg.subcommand != "equiv") || !cfg.f_spec.empty(),
            "--f is required for " + cfg.subcommand);
    require(cfg.r0 > 0.0 && std::isfinite(cfg.r0), "--r0 must be positive");
    require(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0, "tolerances must be positive");
    require(cfg.rings >= 2, "--rings must be at least 2");
    require(cfg.segments >= 3, "--segments must be at least 3");
    if (cfg.window) require(cfg.window->second > cfg.window->first, "--window needs lo < hi");

    std::ofstream file;
    std::ostringstream buffer;
    std::ostream& sink = cfg.out.empty() ? out : static_cast<std::ostream&>(buffer);
    int code = kExitOk;
    bool failed = false;
    try {
      code = it->second(cfg, sink, err);
    } catch (const CheckFailed&) {
      failed = true;
    }
    if (!cfg.out.empty()) {
      file.open(cfg.out, std::ios::binary);
      if (!file) {
        err << "error: io: cannot write '" << cfg.out << "'\n";
        return kExitFailure;
      }
      file << buffer.str();
    }
    if (failed) {
      err << "error: check: " << cfg.subcommand << " property check failed\n";
      return kExitFailure;
    }
    return code;
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: precondition: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: precondition: " << e.what() << '\n';
    return kExitFailure;
  } catch (const TableFileError& e) {
    err << "error: io: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::domain_error& e) {
    err << "error: numeric: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotational prescribed mean curvature surfaces: integrate, classify, compare, certify", "hcat"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "TOML file with option values (flags win)");
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunConfig cfg;
  std::vector<double> window;
  double x_max = 0.0;
  app.add_option("--h", cfg.h_spec, "prescription spec");
  app.add_option("--f", cfg.f_spec, "second prescription spec");
  app.add_option("--r0", cfg.r0, "necksize");
  app.add_option("--r-list", cfg.r_list, "comma-separated necksizes")->delimiter(',');
  auto* xmax_opt = app.add_option("--xmax", x_max, "integration radius");
  app.add_option("--rel-tol", cfg.rel_tol, "relative tolerance");
  app.add_option("--abs-tol", cfg.abs_tol, "absolute tolerance");
  app.add_option("--branch", cfg.branch, "upper|lower|both")->check(CLI::IsMember({"upper", "lower", "both"}));
  app.add_option("--window", window, "lo,hi")->delimiter(',')->expected(2);
  app.add_option("--out", cfg.out, "output path (default: standard output)");
  app.add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--rings", cfg.rings, "mesh rings per branch");
  app.add_option("--segments", cfg.segments, "mesh segments");
  app.add_option("--threads", cfg.threads, "sweep workers (default: all cores)");

  const std::pair<const char*, const char*> subs[] = {
      {"profile", "integrate and write the profile CSV"},
      {"classify", "behavior at infinity of each end (JSON)"},
      {"compare", "comparison inequalities for H > F (JSON or CSV)"},
      {"equiv", "verdict transfer between equivalent prescriptions (JSON)"},
      {"certify", "half-space certificate (JSON)"},
      {"mesh", "surface mesh (OBJ)"},
      {"sweep", "classify over --r-list in parallel (JSON)"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (xmax_opt->count() > 0) cfg.x_max = x_max;
  if (!window.empty()) cfg.window = std::pair{window[0], window[1]};
  return run(cfg, out, err);
}

}  // namespace hcat
