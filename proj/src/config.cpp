#include "ouq/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ouq/errors.hpp"

namespace ouq {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

DistributionFamily family_from_name(const std::string& name) {
  if (name == "gumbel") return DistributionFamily::Gumbel;
  if (name == "normal") return DistributionFamily::Normal;
  if (name == "uniform") return DistributionFamily::Uniform;
  if (name == "lognormal") return DistributionFamily::LogNormal;
  throw ConfigError("unknown distribution family '" + name + "'");
}

InputSpec parse_input(const ordered_json& j) {
  InputSpec in;
  in.name = j.value("name", "");
  if (!j.contains("lower") || !j.contains("upper"))
    throw ConfigError("input '" + in.name + "': needs lower and upper bounds");
  in.lower = j.at("lower").get<double>();
  in.upper = j.at("upper").get<double>();
  if (!j.contains("moments") || !j.at("moments").is_array() || j.at("moments").empty())
    throw ConfigError("input '" + in.name + "': needs a non-empty moments array");
  int order = 0;
  for (const auto& m : j.at("moments")) {
    ++order;
    if (m.is_number()) {
      in.constraints.push_back(MomentConstraint::equality(order, m.get<double>()));
    } else if (m.is_object() && m.contains("lo") && m.contains("hi")) {
      in.constraints.push_back(
          MomentConstraint::interval(order, m.at("lo").get<double>(), m.at("hi").get<double>()));
    } else {
      throw ConfigError("input '" + in.name + "': moment entries are numbers or {lo, hi}");
    }
  }
  in.validate();
  return in;
}

DistributionSpec parse_distribution(const ordered_json& j) {
  DistributionSpec d;
  d.family = family_from_name(j.at("family").get<std::string>());
  const auto& params = j.at("params");
  if (!params.is_array() || params.size() != 2)
    throw ConfigError("distribution: params must be [a, b]");
  d.a = params[0].get<double>();
  d.b = params[1].get<double>();
  if (j.contains("truncate")) {
    const auto& t = j.at("truncate");
    if (!t.is_array() || t.size() != 2)
      throw ConfigError("distribution: truncate must be [lo, hi]");
    d.truncation = {t[0].get<double>(), t[1].get<double>()};
  }
  d.validate();
  return d;
}

ordered_json measure_to_json(const ProductMeasure& measure) {
  ordered_json inputs = ordered_json::array();
  for (const DiscreteMeasure& m : measure.inputs) {
    ordered_json one;
    one["atoms"] = m.atoms;
    one["weights"] = m.weights;
    inputs.push_back(std::move(one));
  }
  return inputs;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file " + path.string());
  out << content;
}

}  // namespace

std::shared_ptr<const Model> ProblemConfig::make_model() const {
  if (external_model) return make_external_model(*external_model);
  return make_builtin_model(builtin_model, model_dimension());
}

int ProblemConfig::model_dimension() const {
  if (const auto* b = std::get_if<BaselineTask>(&task))
    return static_cast<int>(b->distributions.size());
  return static_cast<int>(inputs.size());
}

ProblemConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ProblemConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.workers = j.value("workers", 0);
  cfg.output_prefix = j.value("output_prefix", std::string{});

  if (j.contains("inputs"))
    for (const auto& in : j.at("inputs")) cfg.inputs.push_back(parse_input(in));

  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "equality")
      cfg.mode = ConstraintMode::Equality;
    else if (mode == "inequality")
      cfg.mode = ConstraintMode::Inequality;
    else
      throw ConfigError("mode must be \"equality\" or \"inequality\"");
  } else {
    const bool any_interval = std::any_of(cfg.inputs.begin(), cfg.inputs.end(),
                                          [](const InputSpec& s) { return s.has_intervals(); });
    cfg.mode = any_interval ? ConstraintMode::Inequality : ConstraintMode::Equality;
  }

  if (!j.contains("model")) throw ConfigError("config needs a model section");
  const auto& jm = j.at("model");
  if (jm.contains("builtin")) {
    cfg.builtin_model = jm.at("builtin").get<std::string>();
  } else if (jm.contains("command")) {
    ExternalModelConfig ext;
    ext.command = jm.at("command").get<std::string>();
    ext.working_directory = jm.value("workdir", std::string{});
    ext.batch_limit = jm.value("batch_size", 1024);
    ext.timeout_seconds = jm.value("timeout_seconds", 30.0);
    ext.output_units = jm.value("units", std::string{});
    cfg.external_model = std::move(ext);
  } else {
    throw ConfigError("model section needs \"builtin\" or \"command\"");
  }

  if (!j.contains("task")) throw ConfigError("config needs a task section");
  const auto& jt = j.at("task");
  const std::string type = jt.value("type", "");
  if (type == "envelope") {
    EnvelopeTask task;
    if (jt.contains("thresholds") && jt.at("thresholds").is_array()) {
      task.thresholds = jt.at("thresholds").get<std::vector<double>>();
    } else if (jt.contains("thresholds")) {
      const auto& t = jt.at("thresholds");
      const double lo = t.at("min").get<double>();
      const double hi = t.at("max").get<double>();
      const int count = t.at("count").get<int>();
      if (count < 1 || !(lo <= hi)) throw ConfigError("invalid threshold grid");
      for (int i = 0; i < count; ++i)
        task.thresholds.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    } else {
      throw ConfigError("envelope task needs a thresholds grid");
    }
    cfg.task = std::move(task);
  } else if (type == "max_quantile") {
    QuantileTask task;
    task.p = jt.at("p").get<double>();
    task.search_lo = jt.at("search").at("min").get<double>();
    task.search_hi = jt.at("search").at("max").get<double>();
    task.resolution = jt.value("resolution", 0.0);
    cfg.task = task;
  } else if (type == "baseline") {
    BaselineTask task;
    for (const auto& d : jt.at("distributions"))
      task.distributions.push_back(parse_distribution(d));
    if (task.distributions.empty()) throw ConfigError("baseline task needs distributions");
    task.sample_size = jt.value("n", 100000);
    task.p = jt.value("p", 0.95);
    if (jt.contains("bootstrap")) {
      task.bootstrap_resamples = jt.at("bootstrap").value("resamples", 500);
      task.ci_level = jt.at("bootstrap").value("level", 0.9);
    }
    cfg.task = std::move(task);
  } else {
    throw ConfigError("task type must be envelope, max_quantile or baseline");
  }

  if (j.contains("solver")) {
    const auto& js = j.at("solver");
    cfg.solver.population_size = js.value("population", 0);
    cfg.solver.mutation_factor = js.value("mutation", 0.8);
    cfg.solver.crossover_rate = js.value("crossover", 0.9);
    cfg.solver.max_generations = js.value("generations", 300);
    cfg.solver.tolerance = js.value("tolerance", 1e-8);
    cfg.restarts = js.value("restarts", 3);
  }
  cfg.solver.seed = cfg.seed;
  cfg.solver.workers = cfg.workers;

  const bool needs_inputs = !std::holds_alternative<BaselineTask>(cfg.task);
  if (needs_inputs) {
    if (cfg.inputs.empty()) throw ConfigError("this task needs an inputs section");
    if (cfg.builtin_model == "hydraulic" && cfg.inputs.size() != 4)
      throw ConfigError("hydraulic model needs exactly 4 inputs");
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

namespace {

EnvelopeSettings settings_from(const ProblemConfig& config) {
  EnvelopeSettings s;
  s.solver = config.solver;
  s.restarts = config.restarts;
  return s;
}

// Fails fast on constraint sets outside the moment space, before any model
// process is spawned or grid point solved.
void check_inputs_feasible(const ProblemConfig& config) {
  if (std::holds_alternative<BaselineTask>(config.task)) return;
  for (const InputSpec& in : config.inputs) {
    in.validate();
    if (config.mode == ConstraintMode::Equality) {
      if (in.has_intervals())
        throw ConfigError("input '" + in.name +
                          "': interval constraints require inequality mode");
      MomentSequence raw;
      raw.lower = in.lower;
      raw.upper = in.upper;
      raw.values = in.equality_values();
      const CanonicalSequence canon = moments_to_canonical(to_unit_interval(raw));
      if (canon.boundary_terminated)
        throw BoundaryMoments("input '" + in.name +
                              "': constraints pin the measure; nothing to optimize");
    }
  }
}

void run_envelope(const ProblemConfig& config, const EnvelopeTask& task,
                  const std::filesystem::path& dir, std::ostream& diag) {
  const auto model = config.make_model();
  const EnvelopeCurve curve =
      lower_envelope(config.inputs, model, config.mode, task.thresholds,
                     settings_from(config));

  const bool any_ok = std::any_of(curve.points.begin(), curve.points.end(),
                                  [](const EnvelopePoint& p) { return p.ok; });
  if (!any_ok)
    throw ModelEvaluationError("every grid point failed; first error: " +
                               curve.points.front().error);

  std::string csv = "h,envelope_value\n";
  ordered_json sidecar;
  sidecar["task"] = "envelope";
  sidecar["seed"] = config.seed;
  auto& points = sidecar["points"] = ordered_json::array();
  for (const EnvelopePoint& p : curve.points) {
    if (p.ok) csv += fmt17(p.threshold) + "," + fmt17(p.value) + "\n";
    ordered_json one;
    one["h"] = p.threshold;
    one["ok"] = p.ok;
    if (p.ok) {
      one["envelope_value"] = p.value;
      one["raw_value"] = p.raw_value;
      one["converged"] = p.report.converged;
      one["objective_calls"] = p.report.objective_calls;
      one["argmin"] = measure_to_json(p.argmin);
    } else {
      one["error"] = p.error;
    }
    points.push_back(std::move(one));
  }
  write_file(dir / (config.output_prefix + "envelope.csv"), csv);
  write_file(dir / (config.output_prefix + "measures.json"), sidecar.dump(2) + "\n");
  diag << "envelope: " << curve.points.size() << " grid points -> "
       << (dir / (config.output_prefix + "envelope.csv")).string() << "\n";
}

void run_quantile(const ProblemConfig& config, const QuantileTask& task,
                  const std::filesystem::path& dir, std::ostream& diag) {
  const auto model = config.make_model();
  const QuantileResult result =
      max_quantile(config.inputs, model, config.mode, task.p, task.search_lo,
                   task.search_hi, task.resolution, settings_from(config));

  ordered_json j;
  j["task"] = "max_quantile";
  j["seed"] = config.seed;
  j["p"] = result.level;
  j["max_quantile"] = result.value;
  j["bracket"] = {result.bracket_lo, result.bracket_hi};
  j["probes"] = result.probes;
  j["witness"] = measure_to_json(result.witness);
  write_file(dir / (config.output_prefix + "quantile.json"), j.dump(2) + "\n");
  diag << "max quantile at level " << task.p << ": " << result.value << "\n";
}

void run_baseline(const ProblemConfig& config, const BaselineTask& task,
                  const std::filesystem::path& dir, std::ostream& diag) {
  const auto model = config.make_model();
  const int d = static_cast<int>(task.distributions.size());
  const int n = task.sample_size;

  std::vector<double> points(static_cast<std::size_t>(n) * d);
  for (int c = 0; c < d; ++c) {
    const std::vector<double> draws =
        sample(task.distributions[c], n, config.seed + 101 * (c + 1));
    for (int i = 0; i < n; ++i) points[static_cast<std::size_t>(i) * d + c] = draws[i];
  }
  std::vector<double> outputs(n);
  model->evaluate_batch(points, outputs);

  const EmpiricalCdf cdf{outputs};
  const double q = empirical_quantile(cdf, task.p);
  const auto [lo, hi] = bootstrap_ci(cdf.sorted_values, task.p, task.ci_level,
                                     task.bootstrap_resamples,
                                     config.seed + 777, config.workers);

  ordered_json j;
  j["task"] = "baseline";
  j["seed"] = config.seed;
  j["n"] = n;
  j["p"] = task.p;
  j["quantile"] = q;
  j["ci_level"] = task.ci_level;
  j["ci"] = {lo, hi};
  j["bootstrap_resamples"] = task.bootstrap_resamples;
  write_file(dir / (config.output_prefix + "baseline.json"), j.dump(2) + "\n");

  // Plot-ready empirical CDF, thinned to at most 512 rows.
  std::string csv = "value,cdf\n";
  const std::size_t rows = std::min<std::size_t>(cdf.size(), 512);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = (cdf.size() - 1) * r / std::max<std::size_t>(rows - 1, 1);
    csv += fmt17(cdf.sorted_values[i]) + "," +
           fmt17(static_cast<double>(i + 1) / static_cast<double>(cdf.size())) + "\n";
  }
  write_file(dir / (config.output_prefix + "baseline_cdf.csv"), csv);
  diag << "baseline quantile " << q << " with " << task.ci_level * 100
       << "% CI [" << lo << ", " << hi << "]\n";
}

}  // namespace

int run_task(const ProblemConfig& config, const std::string& output_dir,
             std::ostream& diag) {
  try {
    check_inputs_feasible(config);
    const std::filesystem::path dir(output_dir.empty() ? "." : output_dir);
    std::filesystem::create_directories(dir);
    std::visit(
        [&](const auto& task) {
          using T = std::decay_t<decltype(task)>;
          if constexpr (std::is_same_v<T, EnvelopeTask>)
            run_envelope(config, task, dir, diag);
          else if constexpr (std::is_same_v<T, QuantileTask>)
            run_quantile(config, task, dir, diag);
          else
            run_baseline(config, task, dir, diag);
        },
        config.task);
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception(diag);
  }
}

int validate_config(const ProblemConfig& config, std::ostream& diag) {
  try {
    for (const InputSpec& in : config.inputs) {
      in.validate();
      if (!in.has_intervals()) {
        MomentSequence raw;
        raw.lower = in.lower;
        raw.upper = in.upper;
        raw.values = in.equality_values();
        const CanonicalSequence canon = moments_to_canonical(to_unit_interval(raw));
        diag << "input '" << in.name << "': feasible (canonical";
        for (double p : canon.values) diag << ' ' << p;
        diag << ")\n";
      } else {
        // Decode the centre of every moment box; report where it lands.
        ObjectiveSpec probe;
        probe.inputs = {in};
        probe.model = make_builtin_model("linear", 1);
        probe.mode = ConstraintMode::Inequality;
        probe.threshold = in.upper;
        PofEvaluator evaluator(probe);
        std::vector<double> mid(parameter_dimension(probe), 0.5);
        const ProductMeasure m = evaluator.decode(mid);
        diag << "input '" << in.name << "': interval constraints decodable; "
             << "midpoint measure has " << m.inputs[0].size() << " atoms\n";
      }
    }

    if (config.external_model) {
      const auto model = config.make_model();
      std::vector<double> mid(model->dimension(), 0.5);
      for (std::size_t i = 0; i < config.inputs.size() && i < mid.size(); ++i)
        mid[i] = 0.5 * (config.inputs[i].lower + config.inputs[i].upper);
      if (const auto* b = std::get_if<BaselineTask>(&config.task))
        for (std::size_t i = 0; i < b->distributions.size() && i < mid.size(); ++i) {
          const auto [lo, hi] = b->distributions[i].support_range();
          mid[i] = 0.5 * (lo + hi);
        }
      double out = 0.0;
      model->evaluate_batch(mid, {&out, 1});
      diag << "external model: handshake ok (midpoint -> " << out << ")\n";
    } else {
      (void)config.make_model();
      diag << "model: builtin '" << config.builtin_model << "' ok\n";
    }
    diag << "ok\n";
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception(diag);
  }
}

int exit_code_for_current_exception(std::ostream& diag) {
  try {
    throw;
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleMoments& e) {
    diag << "infeasible moments: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BoundaryMoments& e) {
    diag << "infeasible moments: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BracketingFailure& e) {
    diag << "bracketing failure: " << e.what() << "\n";
    return kExitBracketing;
  } catch (const ModelEvaluationError& e) {
    diag << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace ouq
