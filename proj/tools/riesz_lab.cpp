// riesz_lab: command-line driver for the kernel, counterexample and verify
// experiments. Exit codes: 0 ok, 2 usage/domain, 3 non-convergence,
// 4 a check failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "riesz/riesz.hpp"

using json = nlohmann::ordered_json;
using namespace riesz;

namespace {

constexpr int kUsage = 2;
constexpr int kNonConvergence = 3;
constexpr int kCheckFailed = 4;

const std::vector<std::string> kCommands{"kernel", "counterexample", "verify"};

// Options not echoed into the embedded config.
bool skip_option(const CLI::Option* o) {
  const auto& n = o->get_lnames();
  return n.empty() || n[0] == "help" || n[0] == "config";
}

std::string option_value(const CLI::Option* o) {
  if (o->count() == 0) return o->get_default_str();
  std::string s;
  for (const auto& r : o->results()) s += (s.empty() ? "" : ",") + r;
  return s;
}

/// The resolved configuration: command, global options, then the
/// subcommand's options in declaration order.
std::vector<std::pair<std::string, std::string>> resolved_config(const CLI::App& app, const CLI::App& sub) {
  std::vector<std::pair<std::string, std::string>> out{{"command", sub.get_name()}};
  for (const auto* o : app.get_options())
    if (!skip_option(o)) out.emplace_back(o->get_lnames()[0], option_value(o));
  for (const auto* o : sub.get_options())
    if (!skip_option(o)) out.emplace_back(o->get_lnames()[0], option_value(o));
  return out;
}

json config_json(const std::vector<std::pair<std::string, std::string>>& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg) j[k] = v;
  return j;
}

void config_comment(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& cfg) {
  for (const auto& [k, v] : cfg) os << "# " << k << '=' << v << '\n';
}

// `--alpha 3` is the balanced index of order 3; `--alpha 2,1` is explicit.
MultiIndex parse_alpha(const std::string& s, int n) {
  std::vector<int> e;
  for (const auto& f : split_fields(s)) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(f, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != f.size() || v < 0) throw DomainError("--alpha: bad entry '" + f + "'");
    e.push_back(v);
  }
  if (e.size() == 1 && n > 1) return MultiIndex::balanced(n, e[0]);
  if (static_cast<int>(e.size()) != n)
    throw DomainError("--alpha: expected one order or " + std::to_string(n) + " entries, got '" + s + "'");
  return MultiIndex(std::span<const int>(e));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "' for writing");
  return f;
}

json sweep_json(const SweepResult& r) {
  auto pt = [](const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
    return a;
  };
  json j;
  j["max_ratio"] = r.max_ratio;
  j["max_ratio_half"] = r.max_ratio_half;
  j["change"] = r.change();
  j["samples"] = r.samples;
  j["finite"] = r.finite;
  j["stable"] = r.stable;
  j["argmax_x"] = pt(r.argmax_x);
  j["argmax_y"] = pt(r.argmax_y);
  return j;
}

// ---------------------------------------------------------------------------

struct KernelArgs {
  std::string alpha;
  int n = 1;
  std::string x, y, batch;
  std::string form = "auto";
  double rel_tol = 1e-10, abs_tol = 1e-13;
  std::string out;
};

int run_kernel(const KernelArgs& a, int jobs, const std::vector<std::pair<std::string, std::string>>& cfg) {
  if (a.n < 1 || a.n > kMaxDim) throw DomainError("--n out of range");
  const MultiIndex alpha = parse_alpha(a.alpha, a.n);
  if (alpha.order() < 1) throw DomainError("--alpha: |alpha| must be at least 1");
  const QuadratureConfig q{.rel_tol = a.rel_tol, .abs_tol = a.abs_tol};
  q.validate();
  if (a.form != "auto" && a.form != "direct" && a.form != "factored" && a.form != "both")
    throw DomainError("--form must be auto, direct, factored or both");
  std::vector<std::pair<Point, Point>> pairs;
  if (!a.batch.empty()) {
    if (!a.x.empty() || !a.y.empty()) throw DomainError("--batch excludes --x/--y");
    std::ifstream in(a.batch);
    if (!in) throw DomainError("cannot open batch file '" + a.batch + "'");
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (line.empty() || line[0] == '#') continue;
      const auto v = parse_list(line);
      if (v.empty()) continue;
      if (static_cast<int>(v.size()) != 2 * a.n)
        throw DomainError("batch line " + std::to_string(no) + ": expected " + std::to_string(2 * a.n) + " numbers");
      pairs.emplace_back(Point(std::span<const double>(v.data(), a.n)), Point(std::span<const double>(v.data() + a.n, a.n)));
    }
  } else {
    if (a.x.empty() || a.y.empty()) throw DomainError("need --x and --y, or --batch");
    pairs.emplace_back(parse_point(a.x, a.n), parse_point(a.y, a.n));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].first == pairs[i].second)
      throw DomainError("kernel: diagonal point x = y (pair " + std::to_string(i + 1) + ")");

  struct Row {
    std::size_t pair;
    KernelValue v;
  };
  std::vector<std::pair<std::size_t, KernelForm>> jobs_list;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    if (a.form == "both") {
      jobs_list.emplace_back(i, KernelForm::direct);
      jobs_list.emplace_back(i, KernelForm::factored);
    } else if (a.form == "auto") {
      jobs_list.emplace_back(i, default_form(x, y));
    } else {
      jobs_list.emplace_back(i, a.form == "direct" ? KernelForm::direct : KernelForm::factored);
    }
  }
  const auto rows = parallel_map<Row>(
      jobs_list.size(),
      [&](std::size_t j) {
        const auto& [i, form] = jobs_list[j];
        return Row{i, riesz_kernel(alpha, pairs[i].first, pairs[i].second, form, q)};
      },
      jobs);

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  config_comment(os, cfg);
  std::vector<std::string> head;
  for (int i = 0; i < a.n; ++i) head.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < a.n; ++i) head.push_back("y" + std::to_string(i + 1));
  for (const char* h : {"form", "log_value", "sign", "subdivisions", "rel_error"}) head.emplace_back(h);
  write_csv_row(os, head);
  for (const auto& r : rows) {
    std::vector<std::string> f;
    for (int i = 0; i < a.n; ++i) f.push_back(format_double(pairs[r.pair].first[i]));
    for (int i = 0; i < a.n; ++i) f.push_back(format_double(pairs[r.pair].second[i]));
    f.emplace_back(to_string(r.v.form));
    f.push_back(r.v.value.is_zero() ? "-inf" : format_double(static_cast<double>(r.v.value.logmag())));
    f.push_back(std::to_string(r.v.value.sign()));
    f.push_back(std::to_string(r.v.subdivisions));
    f.push_back(format_double(r.v.rel_error));
    write_csv_row(os, f);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct CounterexampleArgs {
  std::string alpha;
  int n = 2;
  std::string etas = "4,6,8,10";
  double radius = 1.0;
  double u_panel = 0.25;
  int u_order = 6, v_panels = 2, v_order = 6, azimuths = 12;
  double fine_u_scale = 100.0;
  int fine_v_cells = 200, thresholds = 64;
  double threshold_ratio = 1e-6;
  double rel_tol = 1e-8;
  std::string out = "counterexample";
};

int run_counterexample(const CounterexampleArgs& a, int jobs,
                       const std::vector<std::pair<std::string, std::string>>& cfg) {
  if (a.n < 1 || a.n > 3) throw DomainError("--n must be 1..3");
  CounterexampleConfig c;
  c.alpha = parse_alpha(a.alpha, a.n);
  c.etas = parse_list(a.etas);
  c.radius = a.radius;
  c.u_panel = a.u_panel;
  c.u_order = a.u_order;
  c.v_panels = a.v_panels;
  c.v_order = a.v_order;
  c.azimuths = a.azimuths;
  c.fine_u_scale = a.fine_u_scale;
  c.fine_v_cells = a.fine_v_cells;
  c.thresholds = a.thresholds;
  c.threshold_ratio = a.threshold_ratio;
  c.kernel.rel_tol = a.rel_tol;
  c.jobs = jobs;
  c.validate();
  if (a.out.empty()) throw DomainError("--out must not be empty");
  std::string id = "cx_alpha";
  for (int i = 0; i < c.alpha.dim(); ++i) id += (i ? "-" : "") + std::to_string(c.alpha[i]);
  id += "_n" + std::to_string(a.n);

  CounterexampleResult res;
  try {
    res = counterexample_lower_bound(c);
  } catch (const NonConvergence& e) {
    throw NonConvergence(id + ": " + e.what());
  }

  auto csv = open_out(a.out + ".csv");
  config_comment(csv, cfg);
  write_csv_row(csv, {"experiment_id", "eta", "s", "measure", "s_times_measure", "quasi_norm"});
  for (const auto& row : res.rows)
    for (std::size_t i = 0; i < row.report.s.size(); ++i)
      write_csv_row(csv, {id, format_double(row.eta), format_log_scaled(row.report.s[i]),
                          format_log_scaled(row.report.measure[i]),
                          format_log_scaled(row.report.s[i] * row.report.measure[i]), format_log_scaled(row.quasi_norm)});

  json j;
  j["experiment_id"] = id;
  j["config"] = config_json(cfg);
  j["quantity"] = "tube-restricted lower bound of the weak (1,1) quasi-norm";
  j["rows"] = json::array();
  for (const auto& row : res.rows) {
    json r;
    r["eta"] = row.eta;
    r["quasi_norm"] = format_log_scaled(row.quasi_norm);
    r["log_quasi_norm"] = static_cast<double>(row.quasi_norm.logmag());
    r["tube_measure"] = format_log_scaled(row.tube_measure);
    r["max_abs_tf"] = format_log_scaled(row.max_abs_tf);
    r["sign"] = row.sign;
    r["coarse_points"] = row.coarse_points;
    r["fine_cells"] = row.fine_cells;
    r["domain"] = row.report.domain;
    j["rows"].push_back(r);
  }
  int code = 0;
  if (res.has_fit) {
    j["slope"] = res.fit.slope;
    j["intercept"] = res.fit.intercept;
    j["residual"] = res.fit.residual;
    if (a.n == 2) {
      const auto v = counterexample_verdict(c.alpha.order(), res);
      j["spread"] = v.spread;
      j["expectation"] = v.expectation;
      j["pass"] = v.pass;
      if (!v.pass) code = kCheckFailed;
    } else {
      j["expectation"] = "none (pass/fail is defined for n = 2)";
    }
  }
  auto js = open_out(a.out + ".json");
  js << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
  return code;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  bool all = false;
  std::string which = "all";
  int alpha = 0, n = 0;
  std::size_t samples = 1000;
  int b_max = 10000;
  bool no_refine = false;
  std::string json_out;
};

int run_verify(const VerifyArgs& a, std::uint64_t seed, int jobs,
               const std::vector<std::pair<std::string, std::string>>& cfg) {
  std::vector<std::string> suites;
  if (a.all) {
    if (!a.suite.empty()) throw DomainError("verify: give a suite or --all, not both");
    suites = verify_suites();
  } else {
    if (a.suite.empty()) throw DomainError("verify: missing suite (or --all)");
    const auto& known = verify_suites();
    if (std::find(known.begin(), known.end(), a.suite) == known.end())
      throw DomainError("verify: unknown suite '" + a.suite + "'");
    suites = {a.suite};
  }
  VerifyOptions o;
  o.seed = seed;
  o.jobs = jobs;
  o.samples = a.samples;
  o.which = a.which;
  if (a.alpha > 0) o.alpha = a.alpha;
  if (a.n > 0) o.n = a.n;
  o.B_max = a.b_max;
  o.refine = !a.no_refine;
  if (o.samples < 1) throw DomainError("--samples must be positive");
  select_bounds(o.which); // validate before any computation

  json j;
  j["config"] = config_json(cfg);
  j["suites"] = json::array();
  bool pass = true;
  for (const auto& s : suites) {
    const auto rep = run_verify_suite(s, o);
    std::cerr << "verify " << s << ": " << (rep.pass() ? "pass" : "FAIL") << " in " << rep.seconds << " s\n";
    json js;
    js["suite"] = rep.suite;
    js["pass"] = rep.pass();
    js["checks"] = json::array();
    for (const auto& c : rep.checks) {
      json jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["measured"] = c.measured;
      jc["threshold"] = c.threshold;
      jc["relation"] = c.relation;
      jc["detail"] = c.detail;
      if (c.sweep) jc["sweep"] = sweep_json(*c.sweep);
      js["checks"].push_back(jc);
    }
    pass = pass && rep.pass();
    j["suites"].push_back(js);
  }
  j["pass"] = pass;
  if (!a.json_out.empty()) open_out(a.json_out) << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
  return pass ? 0 : kCheckFailed;
}

// ---------------------------------------------------------------------------

// Config-file values become `--key=value` arguments placed ahead of the
// command-line ones, so flags override the file (last value wins).
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  const auto kv = KeyValueConfig::parse(in);
  auto cmd = std::find_if(args.begin(), args.end(), [](const std::string& s) {
    return std::find(kCommands.begin(), kCommands.end(), s) != kCommands.end();
  });
  std::string command;
  if (cmd != args.end()) {
    command = *cmd;
    args.erase(cmd);
  } else if (kv.has("command")) {
    command = kv.get("command");
  } else {
    throw DomainError("no command given on the command line or in the config file");
  }
  std::vector<std::string> out{command};
  for (const auto& [k, v] : kv.entries())
    if (k != "command" && k != "config") out.push_back("--" + k + "=" + v);
  out.insert(out.end(), args.begin(), args.end());
  return out;
}

void print_error(const char* kind, const std::string& msg) {
  json e;
  e["error"] = kind;
  e["message"] = msg;
  std::cerr << e.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riesz transforms of the inverse-Gaussian Laplacian: kernels, counterexample, verification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  std::string config_path;
  std::uint64_t seed = 20240601;
  int jobs = 0;
  app.add_option("--config", config_path, "key=value config file; command-line flags override it");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--jobs", jobs, "worker threads (0: RIESZ_LAB_JOBS or all cores)");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "evaluate the Riesz kernel K_{R_alpha}(x,y)");
  kernel->add_option("--alpha", ka.alpha, "order k (balanced index) or entries a1,...,an")->required();
  kernel->add_option("--n", ka.n, "dimension");
  kernel->add_option("--x", ka.x, "x coordinates, comma separated");
  kernel->add_option("--y", ka.y, "y coordinates, comma separated");
  kernel->add_option("--batch", ka.batch, "file with one pair per line: x1..xn y1..yn");
  kernel->add_option("--form", ka.form, "auto | direct | factored | both");
  kernel->add_option("--rel-tol", ka.rel_tol, "quadrature relative tolerance");
  kernel->add_option("--abs-tol", ka.abs_tol, "quadrature absolute tolerance");
  kernel->add_option("--out", ka.out, "CSV output file (default stdout)");

  CounterexampleArgs ca;
  auto* cx = app.add_subcommand("counterexample", "tube-restricted weak-type lower bound versus eta");
  cx->add_option("--alpha", ca.alpha, "order k (balanced index) or entries a1,...,an")->required();
  cx->add_option("--n", ca.n, "dimension");
  cx->add_option("--etas", ca.etas, "comma-separated eta values (>= 4)");
  cx->add_option("--radius", ca.radius, "radius of the ball around z");
  cx->add_option("--u-panel", ca.u_panel, "coarse grid: axial panel length");
  cx->add_option("--u-order", ca.u_order, "coarse grid: axial nodes per panel");
  cx->add_option("--v-panels", ca.v_panels, "coarse grid: transverse panels");
  cx->add_option("--v-order", ca.v_order, "coarse grid: transverse nodes per panel");
  cx->add_option("--azimuths", ca.azimuths, "coarse grid: azimuths (n = 3)");
  cx->add_option("--fine-u-scale", ca.fine_u_scale, "fine grid: axial cells per unit of 1/|z|");
  cx->add_option("--fine-v-cells", ca.fine_v_cells, "fine grid: transverse cells");
  cx->add_option("--thresholds", ca.thresholds, "number of level-set thresholds");
  cx->add_option("--threshold-ratio", ca.threshold_ratio, "lowest threshold relative to max |Rf|");
  cx->add_option("--rel-tol", ca.rel_tol, "kernel quadrature relative tolerance");
  cx->add_option("--out", ca.out, "output prefix: writes PREFIX.csv and PREFIX.json");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run an invariant suite and emit a JSON report");
  verify->add_option("suite,--suite", va.suite, "identities | orthonormality | semigroup | cz-local | lemma-bounds | l2-norms");
  verify->add_flag("--all", va.all, "run every suite");
  verify->add_option("--which", va.which, "lemma-bounds: estimate id (e.g. 5.2.3.2, A10) or all");
  verify->add_option("--alpha", va.alpha, "l2-norms / cz-local: order |alpha|");
  verify->add_option("--n", va.n, "l2-norms / cz-local: dimension");
  verify->add_option("--samples", va.samples, "sweeps: pairs in the coarse sample (doubled for the fine one)");
  verify->add_option("--b-max", va.b_max, "l2-norms: largest |b|");
  verify->add_flag("--no-refine", va.no_refine, "lemma-bounds: plain sampling without local polish");
  verify->add_option("--json", va.json_out, "also write the report to this file");

  try {
    const auto args = expand_args(argc, argv);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  } catch (const Error& e) {
    print_error("usage", e.what());
    return kUsage;
  }

  try {
    const int nj = resolve_jobs(jobs);
    if (kernel->parsed()) return run_kernel(ka, nj, resolved_config(app, *kernel));
    if (cx->parsed()) return run_counterexample(ca, nj, resolved_config(app, *cx));
    if (verify->parsed()) return run_verify(va, seed, nj, resolved_config(app, *verify));
  } catch (const NonConvergence& e) {
    print_error("non-convergence", e.what());
    return kNonConvergence;
  } catch (const DomainError& e) {
    print_error("domain", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return kUsage;
}
