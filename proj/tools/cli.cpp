#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"

#include "ihse/errors.hpp"
#include "ihse/io.hpp"
#include "ihse/jacobian_lab.hpp"
#include "ihse/measure_mc.hpp"
#include "ihse/parallel.hpp"
#include "ihse/simulator.hpp"
#include "ihse/tct.hpp"

namespace ihse::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::string csv_path;
  double eps0 = 1.0;
  int dim = 2;
  std::uint64_t seed = 0;
  Tolerances tol;
  double h = kDefaultFdStep;
  std::size_t max_events = SimOptions{}.max_events;

  double tau = 1.0;
  double T = 1.0;
  std::size_t samples = 100;
  std::size_t n_particles = 3;
  std::size_t jacobian_particles = 0;
  double R1 = 2.5;
  double R2 = 1.0;
  std::size_t checkpoints = 100;
  std::string family = "E";
  int k = 0;
  double delta = 0.1;
  double mu = 0.5;
  std::string predicate = "band";
  double radius = 1e-5;
  std::string kind = "any";
  double range = 10.0;
};

// Thrown for pathology-dominated outcomes; mapped to exit status 3.
struct PathologyExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ModelParams model(const Options& o) {
  ModelParams p{o.eps0, o.dim};
  p.validate();
  return p;
}

void check_tolerances(const Options& o) {
  const double values[] = {o.tol.contact_tol, o.tol.grazing_tol, o.tol.simultaneity_tol, o.tol.crit_tol, o.h};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::Usage, "every tolerance must be positive");
  }
  if (o.max_events == 0) throw Error(ErrorCode::Usage, "max-events must be positive");
}

KindFilter kind_filter(const std::string& s) {
  if (s == "any") return KindFilter::Any;
  if (s == "elastic") return KindFilter::Elastic;
  if (s == "inelastic") return KindFilter::Inelastic;
  throw Error(ErrorCode::Usage, "kind must be any, elastic or inelastic");
}

Json numerics(const Options& o) {
  Json j = to_json(o.tol);
  j["h"] = number(o.h);
  j["max_events"] = o.max_events;
  return j;
}

Json base_config(const std::string& command, const Options& o) {
  return {{"command", command},
          {"params", to_json(ModelParams{o.eps0, o.dim})},
          {"seed", o.seed},
          {"numerics", numerics(o)},
          {"io", {{"config", o.config_path}, {"out", o.out_path}, {"format", o.format}, {"csv", o.csv_path}}}};
}

// ---------------------------------------------------------------------------
// output

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Usage, "cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw Error(ErrorCode::Usage, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

/// Primary output; the wall-clock time lives in <out>.meta.json so reruns
/// give byte-identical primary files.
void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  write_atomic(o.out_path, text);
  const Json meta = {{"schema", kSchemaVersion}, {"output", o.out_path}, {"generated_at", utc_timestamp()}};
  write_atomic(o.out_path + ".meta.json", meta.dump(2) + "\n");
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) s += ',';
    s += cells[k];
  }
  return s + "\n";
}

std::string csv_opt(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

void append_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::string>& row) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error(ErrorCode::Usage, "cannot append to " + path);
  if (fresh) f << csv_line(header);
  f << csv_line(row);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Sample stream plus summary, rendered in the requested format.
std::string render(const Options& o, const Json& config, const std::vector<Json>& samples,
                   const Json& summary, const Table& table) {
  if (o.format == "json") {
    Json doc = {{"schema", kSchemaVersion}, {"config", config}};
    doc["samples"] = samples;
    doc["summary"] = summary;
    return doc.dump(2) + "\n";
  }
  if (o.format == "jsonl") {
    std::string s;
    for (const auto& smp : samples) {
      Json line = {{"schema", kSchemaVersion}, {"type", "sample"}};
      line.update(smp);
      s += line.dump() + "\n";
    }
    Json last = {{"schema", kSchemaVersion}, {"type", "summary"}, {"config", config}};
    last.update(summary);
    return s + last.dump() + "\n";
  }
  std::string s = csv_line(table.header);
  for (const auto& r : table.rows) s += csv_line(r);
  return s;
}

std::string render_document(const Options& o, const Json& config, const Json& result) {
  if (o.format == "csv") throw Error(ErrorCode::Usage, "csv output is not available for this command");
  Json doc = {{"schema", kSchemaVersion}, {"config", config}, {"result", result}};
  return o.format == "jsonl" ? doc.dump() + "\n" : doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// --config handling

std::optional<Json> g_config_json;

const Json& config_json(const Options& o) {
  if (!g_config_json) {
    std::ifstream in(o.config_path);
    if (!in) throw Error(ErrorCode::Usage, "cannot open " + o.config_path);
    try {
      g_config_json = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::Usage, o.config_path + ": " + e.what());
    }
  }
  return *g_config_json;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw Error(ErrorCode::Usage, "config value must be a scalar: " + v.dump());
}

/// Fills options not given on the command line from the config file: keys at
/// the top level or under "options", with '-' or '_' separators.
void merge_config_values(CLI::App* sub, const Json& cfg) {
  const Json* sources[] = {&cfg, cfg.contains("options") ? &cfg.at("options") : nullptr};
  for (CLI::Option* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config" || opt->count() > 0) continue;
    std::string dashed = names.front();
    std::string under = dashed;
    std::replace(under.begin(), under.end(), '-', '_');
    for (const Json* src : sources) {
      if (src == nullptr || !src->is_object()) continue;
      const Json* v = nullptr;
      if (src->contains(dashed)) v = &src->at(dashed);
      else if (src->contains(under)) v = &src->at(under);
      if (v == nullptr) continue;
      opt->add_result(scalar_text(*v));
      opt->run_callback();
      break;
    }
  }
}

Configuration input_configuration(const Options& o) {
  if (o.config_path.empty()) throw Error(ErrorCode::Usage, "--config with a configuration is required");
  const Json& j = config_json(o);
  const Json& c = j.contains("configuration") ? j.at("configuration") : j;
  if (!c.contains("particles")) throw Error(ErrorCode::Usage, o.config_path + " has no particles");
  Configuration cfg = configuration_from_json(c);
  if (cfg.dimension() != o.dim) {
    throw Error(ErrorCode::Usage, "configuration has d = " + std::to_string(cfg.dimension()) +
                                      " but --dim is " + std::to_string(o.dim));
  }
  return cfg;
}

bool has_input_configuration(const Options& o) {
  if (o.config_path.empty()) return false;
  const Json& j = config_json(o);
  return j.contains("particles") || j.contains("configuration");
}

// ---------------------------------------------------------------------------
// commands

std::string cmd_simulate(const Options& o) {
  const ModelParams params = model(o);
  Json config = base_config("simulate", o);
  config["T"] = number(o.T);
  config["checkpoints"] = o.checkpoints;

  Configuration initial = Configuration(Mat::Zero(1, o.dim), Mat::Zero(1, o.dim));
  if (has_input_configuration(o)) {
    initial = input_configuration(o);
  } else {
    CounterRng rng(o.seed, 0);
    initial = sample_initial_configuration(rng, o.n_particles, o.dim, o.R1, o.R2);
    config["random_initial"] = {{"N", o.n_particles}, {"R1", number(o.R1)}, {"R2", number(o.R2)}};
  }
  config["initial"] = to_json(initial);

  const SimOptions sim{o.tol, o.max_events, o.checkpoints};
  const SimReport report = simulate(initial, o.T, params, sim);
  const BoundCheck bounds = check_collision_bounds(report, params, initial, o.max_events);

  std::string events_csv = csv_line({"time", "i", "j", "kind", "ke_before", "ke_after"});
  for (const auto& e : report.events) {
    events_csv += csv_line({format_double(e.time), std::to_string(e.pair.i + 1), std::to_string(e.pair.j + 1),
                            std::string(to_string(e.kind)), format_double(e.ke_before), format_double(e.ke_after)});
  }
  if (!o.csv_path.empty()) write_atomic(o.csv_path, events_csv);

  Json result = to_json(report);
  result["bounds"] = to_json(bounds);
  const std::string text = o.format == "csv" ? events_csv : render_document(o, config, result);
  if (report.halted) {
    throw PathologyExit("simulation halted: " + std::string(to_string(report.halted->reason)) + " at t = " +
                        format_double(report.halted->time) + "\n" + text);
  }
  return text;
}

std::string cmd_classify(const Options& o) {
  const ModelParams params = model(o);
  const Configuration cfg = input_configuration(o);
  Json config = base_config("classify", o);
  config["tau"] = number(o.tau);
  config["configuration"] = to_json(cfg);

  Json predictions = Json::array();
  for (const auto& p : predict_all(cfg, o.tol.grazing_tol)) predictions.push_back(to_json(p));
  const Json result = {{"domain", to_json(validate_configuration(cfg, o.tol.contact_tol))},
                       {"predictions", predictions},
                       {"classification", to_json(classify_tct_domain(cfg, o.tau, params, o.tol))}};
  return render_document(o, config, result);
}

std::string cmd_flow(const Options& o) {
  const ModelParams params = model(o);
  const Configuration cfg = input_configuration(o);
  Json config = base_config("flow", o);
  config["tau"] = number(o.tau);
  config["configuration"] = to_json(cfg);

  const auto cls = classify_tct_domain(cfg, o.tau, params, o.tol);
  if (const auto* ex = std::get_if<Excluded>(&cls)) {
    throw PathologyExit("configuration excluded from the flow domain: " + std::string(to_string(ex->reason)));
  }
  Json result = to_json(tct_flow(cfg, o.tau, params, o.tol));
  try {
    result["jacobian"] = to_json(analytic_flow_jacobian_det(cfg, o.tau, params, o.tol));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unsupported) throw;
    result["jacobian"] = nullptr;
  }
  return render_document(o, config, result);
}

std::string cmd_jacobian(const Options& o) {
  const ModelParams params = model(o);
  if (o.samples == 0) throw Error(ErrorCode::Usage, "samples must be positive");
  const KindFilter kind = kind_filter(o.kind);
  Json config = base_config("jacobian", o);
  config["tau"] = number(o.tau);
  config["samples"] = o.samples;
  config["N"] = o.jacobian_particles;
  config["kind"] = o.kind;

  struct Row {
    std::size_t n = 0;
    std::optional<TctDomainClass> cls;
    std::optional<JacobianReport> report;
    std::string error;
  };
  std::vector<Row> rows(o.samples);
  parallel_for(o.samples, [&](std::size_t idx) {
    Row& row = rows[idx];
    // N = 0 cycles through 2, 3, 4 particles.
    row.n = o.jacobian_particles == 0 ? 2 + idx % 3 : o.jacobian_particles;
    try {
      CounterRng rng(o.seed, idx);
      TctSampleOptions so;
      so.n_particles = row.n;
      so.kind = kind;
      so.safety_radius = 10.0 * o.h;
      const Configuration cfg = sample_tct_configuration(rng, o.tau, params, so);
      row.cls = classify_tct_domain(cfg, o.tau, params, o.tol);
      row.report = verify_flow_jacobian(cfg, o.tau, params, o.h, o.tol);
    } catch (const Error& e) {
      row.error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  std::vector<Json> samples;
  Table table{{"index", "N", "kind", "analytic_det", "fd_det", "prefactor", "det_n_fd", "residual"}, {}};
  double max_residual = 0.0;
  std::size_t ok = 0;
  std::size_t with_analytic = 0;
  std::map<std::string, std::size_t> kinds;
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const Row& r = rows[idx];
    Json s = {{"index", idx}, {"N", r.n}};
    std::string kind_name;
    if (r.report) {
      ++ok;
      kind_name = std::string(to_string(std::get<SingleCollision>(*r.cls).kind));
      ++kinds[kind_name];
      s["classification"] = to_json(*r.cls);
      s["report"] = to_json(*r.report);
      if (r.report->residual) {
        ++with_analytic;
        max_residual = std::max(max_residual, *r.report->residual);
      }
      table.rows.push_back({std::to_string(idx), std::to_string(r.n), kind_name, csv_opt(r.report->analytic_det),
                            format_double(r.report->fd_det), csv_opt(r.report->prefactor),
                            csv_opt(r.report->det_n_fd), csv_opt(r.report->residual)});
    } else {
      s["error"] = r.error;
      table.rows.push_back({std::to_string(idx), std::to_string(r.n), "", "", "", "", "", ""});
    }
    samples.push_back(std::move(s));
  }
  Json summary = {{"samples", rows.size()},
                  {"succeeded", ok},
                  {"failed", rows.size() - ok},
                  {"with_analytic", with_analytic},
                  {"kinds", kinds},
                  {"max_residual", number(max_residual)}};
  const std::string text = render(o, config, samples, summary, table);
  if (ok == 0) throw PathologyExit("every jacobian sample failed\n" + text);
  return text;
}

std::string cmd_scatter_check(const Options& o) {
  const ModelParams params = model(o);
  if (o.samples == 0) throw Error(ErrorCode::Usage, "samples must be positive");
  Json config = base_config("scatter-check", o);
  config["samples"] = o.samples;
  config["kind"] = o.kind;

  ScatteringSampleOptions so;
  so.kind = kind_filter(o.kind);
  so.h = o.h;
  const auto checks = verify_scattering_measure(o.samples, params, o.seed, so);

  std::vector<Json> samples;
  Table table{{"index", "kind", "fd_det", "analytic_det", "residual", "energy_loss", "momentum_error"}, {}};
  double max_det_dev = 0.0;
  double max_residual = 0.0;
  double max_momentum = 0.0;
  double max_energy = 0.0;
  std::size_t ok = 0;
  std::map<std::string, std::size_t> signs;
  for (const auto& c : checks) {
    samples.push_back(to_json(c));
    if (!c.report) {
      table.rows.push_back({std::to_string(c.index), "", "", "", "", "", ""});
      continue;
    }
    ++ok;
    const auto res = scatter(c.input.v_i, c.input.v_j, c.input.omega, params);
    const double momentum = ((res.v_i_post + res.v_j_post) - (c.input.v_i + c.input.v_j)).cwiseAbs().maxCoeff();
    const double expected_loss = c.kind == CollisionKind::Inelastic ? params.epsilon0 : 0.0;
    max_momentum = std::max(max_momentum, momentum);
    max_energy = std::max(max_energy, std::abs(c.loss - expected_loss));
    max_det_dev = std::max(max_det_dev, std::abs(std::abs(c.report->fd_det) - 1.0));
    if (c.report->residual) max_residual = std::max(max_residual, *c.report->residual);
    ++signs[std::string(to_string(c.kind)) + (c.report->fd_det < 0 ? ":-1" : ":+1")];
    table.rows.push_back({std::to_string(c.index), std::string(to_string(c.kind)), format_double(c.report->fd_det),
                          csv_opt(c.report->analytic_det), csv_opt(c.report->residual), format_double(c.loss),
                          format_double(momentum)});
  }
  Json summary = {{"samples", checks.size()},
                  {"succeeded", ok},
                  {"max_abs_det_deviation", number(max_det_dev)},
                  {"max_residual", number(max_residual)},
                  {"max_momentum_error", number(max_momentum)},
                  {"max_energy_error", number(max_energy)},
                  {"det_signs", signs}};
  const std::string text = render(o, config, samples, summary, table);
  if (ok == 0) throw PathologyExit("every scattering sample failed\n" + text);
  return text;
}

std::string cmd_tensor_lemma(const Options& o) {
  if (o.samples == 0) throw Error(ErrorCode::Usage, "samples must be positive");
  if (!(o.range > 0.0)) throw Error(ErrorCode::Usage, "range must be positive");
  Json config = base_config("tensor-lemma", o);
  config["samples"] = o.samples;
  config["range"] = number(o.range);

  std::vector<Json> samples;
  Table table{{"index", "lambda", "mu", "nu", "formula", "direct", "abs_diff"}, {}};
  double max_diff = 0.0;
  for (std::size_t idx = 0; idx < o.samples; ++idx) {
    CounterRng rng(o.seed, idx);
    const TensorLemmaCase c = random_tensor_lemma_case(rng, o.range);
    const TensorLemmaResult r = tensor_sum_det(c);
    const double diff = r.abs_diff;
    max_diff = std::max(max_diff, diff);
    if (o.format != "json") {
      samples.push_back({{"index", idx},
                         {"lambda", number(c.lambda)},
                         {"mu", number(c.mu)},
                         {"nu", number(c.nu)},
                         {"u", to_json(c.u)},
                         {"omega", to_json(c.omega)},
                         {"formula", number(r.formula)},
                         {"direct", number(r.direct)}});
      table.rows.push_back({std::to_string(idx), format_double(c.lambda), format_double(c.mu), format_double(c.nu),
                            format_double(r.formula), format_double(r.direct), format_double(diff)});
    }
  }
  const Json summary = {{"samples", o.samples}, {"max_abs_diff", number(max_diff)}};
  if (o.format == "json") {
    return Json{{"schema", kSchemaVersion}, {"config", config}, {"summary", summary}}.dump(2) + "\n";
  }
  return render(o, config, samples, summary, table);
}

PathologicalSetSpec measure_spec(const Options& o) {
  PathologicalSetSpec spec;
  if (o.family == "E") {
    spec.family = PathologicalFamily::E;
  } else if (o.family == "P") {
    spec.family = PathologicalFamily::P;
    spec.mu = o.mu;
  } else {
    throw Error(ErrorCode::Usage, "family must be E or P");
  }
  if (o.predicate == "band") {
    spec.predicate = PPredicate::Band;
  } else if (o.predicate == "cutoff") {
    spec.predicate = PPredicate::Cutoff;
  } else {
    throw Error(ErrorCode::Usage, "predicate must be band or cutoff");
  }
  spec.n_particles = o.n_particles;
  spec.k = o.k;
  spec.delta = o.delta;
  spec.R1 = o.R1;
  spec.R2 = o.R2;
  spec.params = model(o);
  spec.validate();
  return spec;
}

std::string cmd_measure(const Options& o) {
  const PathologicalSetSpec spec = measure_spec(o);
  if (o.samples == 0) throw Error(ErrorCode::Usage, "samples must be positive");
  Json config = base_config("measure", o);
  config["samples"] = o.samples;
  config["spec"] = to_json(spec);

  const MeasureEstimate est = estimate_pathological_measure(spec, o.samples, o.seed);
  const std::vector<std::string> header{"delta", "mu", "estimate", "ci95"};
  const std::vector<std::string> row{format_double(spec.delta), csv_opt(spec.mu), format_double(est.volume),
                                     format_double(est.ci95)};
  if (!o.csv_path.empty()) append_csv(o.csv_path, header, row);
  if (est.interior == 0) throw PathologyExit("no sampled configuration was interior");
  if (o.format == "csv") return csv_line(header) + csv_line(row);
  return render_document(o, config, to_json(est));
}

std::string cmd_volume(const Options& o) {
  const ModelParams params = model(o);
  const Configuration cfg = input_configuration(o);
  if (!(o.radius > 0.0)) throw Error(ErrorCode::Usage, "radius must be positive");
  Json config = base_config("volume", o);
  config["tau"] = number(o.tau);
  config["radius"] = number(o.radius);
  config["configuration"] = to_json(cfg);

  VolumeOptions vo;
  vo.sim = SimOptions{o.tol, o.max_events};
  vo.seed = o.seed;
  VolumeEvolution v;
  try {
    v = ensemble_volume_evolution(cfg, o.radius, o.tau, params, vo);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BranchCrossing || e.code() == ErrorCode::ExcludedConfiguration) {
      throw PathologyExit(std::string(to_string(e.code())) + ": " + e.what());
    }
    throw;
  }
  const std::vector<std::string> header{"radius", "tau", "predicted", "measured"};
  const std::vector<std::string> row{format_double(o.radius), format_double(o.tau), csv_opt(v.predicted),
                                     format_double(v.measured)};
  if (!o.csv_path.empty()) append_csv(o.csv_path, header, row);
  if (o.format == "csv") return csv_line(header) + csv_line(row);
  return render_document(o, config, to_json(v));
}

// ---------------------------------------------------------------------------
// option wiring

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON file: a configuration and/or option values");
  sub->add_option("--out", o.out_path, "Output file (written atomically); stdout when omitted");
  sub->add_option("--format", o.format, "json | jsonl | csv")->check(CLI::IsMember({"json", "jsonl", "csv"}));
  sub->add_option("--eps0", o.eps0, "Energy quantum lost per inelastic collision ('inf' for elastic only)");
  sub->add_option("--dim", o.dim, "Space dimension");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--contact-tol", o.tol.contact_tol);
  sub->add_option("--grazing-tol", o.tol.grazing_tol);
  sub->add_option("--simultaneity-tol", o.tol.simultaneity_tol);
  sub->add_option("--crit-tol", o.tol.crit_tol);
  sub->add_option("--h", o.h, "Finite-difference step");
  sub->add_option("--max-events", o.max_events);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  g_config_json.reset();
  Options o;
  CLI::App app{"Event-driven inelastic hard spheres with emission: dynamics and verification tools", "ihse"};
  app.require_subcommand(1);
  // -h is left free so that --h (finite-difference step) is unambiguous.
  app.set_help_flag("--help", "Print this help message and exit");

  auto* simulate_cmd = app.add_subcommand("simulate", "Multi-collision event-driven run on [0, T]");
  add_common(simulate_cmd, o);
  simulate_cmd->add_option("--T", o.T, "Final time");
  simulate_cmd->add_option("--N", o.n_particles, "Particles for a random initial configuration");
  simulate_cmd->add_option("--R1", o.R1, "Radius of the stacked position ball");
  simulate_cmd->add_option("--R2", o.R2, "Radius of the stacked velocity ball");
  simulate_cmd->add_option("--checkpoints", o.checkpoints);
  simulate_cmd->add_option("--csv", o.csv_path, "Per-event CSV file");

  auto* classify_cmd = app.add_subcommand("classify", "Free / single-collision / excluded on [0, tau]");
  add_common(classify_cmd, o);
  classify_cmd->add_option("--tau", o.tau);

  auto* flow_cmd = app.add_subcommand("flow", "Transport-collision-transport flow on [0, tau]");
  add_common(flow_cmd, o);
  flow_cmd->add_option("--tau", o.tau);

  auto* jacobian_cmd = app.add_subcommand("jacobian", "Flow determinant: analytic against finite differences");
  add_common(jacobian_cmd, o);
  jacobian_cmd->add_option("--tau", o.tau);
  jacobian_cmd->add_option("--samples", o.samples);
  jacobian_cmd->add_option("--N", o.jacobian_particles, "Particles per sample; 0 cycles through 2, 3, 4");
  jacobian_cmd->add_option("--kind", o.kind, "any | elastic | inelastic");

  auto* scatter_cmd = app.add_subcommand("scatter-check", "Velocity scattering determinant and conservation ledger");
  add_common(scatter_cmd, o);
  scatter_cmd->add_option("--samples", o.samples);
  scatter_cmd->add_option("--kind", o.kind, "any | elastic | inelastic");

  auto* lemma_cmd = app.add_subcommand("tensor-lemma", "Tensor-sum determinant identity on random cases");
  add_common(lemma_cmd, o);
  lemma_cmd->add_option("--samples", o.samples);
  lemma_cmd->add_option("--range", o.range, "Entries uniform in [-range, range]");

  auto* measure_cmd = app.add_subcommand("measure", "Monte Carlo measure of a pathological set");
  add_common(measure_cmd, o);
  measure_cmd->add_option("--family", o.family, "E | P");
  measure_cmd->add_option("--N", o.n_particles);
  measure_cmd->add_option("--k", o.k);
  measure_cmd->add_option("--delta", o.delta);
  measure_cmd->add_option("--mu", o.mu);
  measure_cmd->add_option("--R1", o.R1);
  measure_cmd->add_option("--R2", o.R2);
  measure_cmd->add_option("--samples", o.samples);
  measure_cmd->add_option("--predicate", o.predicate, "band | cutoff");
  measure_cmd->add_option("--csv", o.csv_path, "Append a (delta, mu, estimate, ci95) row");

  auto* volume_cmd = app.add_subcommand("volume", "Local phase-space volume factor along a trajectory");
  add_common(volume_cmd, o);
  volume_cmd->add_option("--tau", o.tau);
  volume_cmd->add_option("--radius", o.radius);
  volume_cmd->add_option("--csv", o.csv_path, "Append a (radius, tau, predicted, measured) row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!o.config_path.empty()) {
      const Json& cfg = config_json(o);
      try {
        merge_config_values(sub, cfg);
      } catch (const CLI::ParseError& e) {
        throw Error(ErrorCode::Usage, std::string("bad value in ") + o.config_path + ": " + e.what());
      }
    }
    check_tolerances(o);

    std::string text;
    const std::string name = sub->get_name();
    if (name == "simulate") text = cmd_simulate(o);
    else if (name == "classify") text = cmd_classify(o);
    else if (name == "flow") text = cmd_flow(o);
    else if (name == "jacobian") text = cmd_jacobian(o);
    else if (name == "scatter-check") text = cmd_scatter_check(o);
    else if (name == "tensor-lemma") text = cmd_tensor_lemma(o);
    else if (name == "measure") text = cmd_measure(o);
    else text = cmd_volume(o);
    emit(o, text, out);
    return kExitOk;
  } catch (const PathologyExit& e) {
    const std::string msg = e.what();
    const auto nl = msg.find('\n');
    err << "ihse: " << msg.substr(0, nl) << "\n";
    // The partial result is still written when there is one.
    if (nl != std::string::npos) {
      try {
        emit(o, msg.substr(nl + 1), out);
      } catch (const std::exception&) {
      }
    }
    return kExitPathology;
  } catch (const Error& e) {
    err << "ihse: " << to_string(e.code()) << ": " << e.what() << "\n";
    if (e.code() == ErrorCode::ExcludedConfiguration || e.code() == ErrorCode::BranchCrossing) return kExitPathology;
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "ihse: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace ihse::cli
