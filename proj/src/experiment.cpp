#include "qdgd/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qdgd/dataset.hpp"
#include "qdgd/errors.hpp"

namespace qdgd {

namespace {

char delimiter_char(const std::string& d) { return d == "whitespace" ? '\0' : d.front(); }

Dataset load_or_generate(const RunConfig& c, bool classification) {
  const LabelRule rule = LabelRule::parse(c.label_rule);
  if (!c.dataset.empty()) return load_dataset(c.dataset, delimiter_char(c.delimiter), rule);
  if (classification) return generate_gaussian_classes(c.samples, c.p, c.class_mean, c.class_var, c.seed);
  Dataset data = generate_digit_like(c.samples, c.p, c.seed);
  if (rule.positive_class) {
    for (Index j = 0; j < data.labels.size(); ++j) data.labels(j) = data.labels(j) == *rule.positive_class ? 1.0 : -1.0;
  }
  return data;
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

const char* kTraceHeader =
    "iteration,relative_error,squared_error,max_node_sq_error,mean_node_sq_error,objective,"
    "node_average_objective,cumulative_bits";

}  // namespace

Network build_network(const RunConfig& c) {
  if (c.graph == "complete") return make_network(generate_named(NamedTopology::complete, c.n));
  if (c.graph == "cycle") return make_network(generate_named(NamedTopology::cycle, c.n));
  return make_network(generate_erdos_renyi(c.n, c.edge_prob, c.seed));
}

ObjectiveSet build_objective(const RunConfig& c) {
  if (c.experiment == "quadratic" || c.experiment == "bounds") return build_quadratic(c.n, c.p, c.seed);
  if (c.experiment == "least_squares" || c.experiment == "tradeoff")
    return build_least_squares(c.n, c.p, c.noise_std, c.seed);
  if (c.experiment == "ridge") return build_ridge(load_or_generate(c, false), c.n, c.lambda, c.seed);
  if (c.experiment == "logistic") return build_logistic(load_or_generate(c, true), c.n, c.lambda, c.seed);
  throw ConfigError("key 'experiment': unknown experiment '" + c.experiment + "'");
}

Quantizer build_quantizer(const RunConfig& c) {
  if (c.quantizer == "exact") return Quantizer::exact();
  if (c.quantizer == "gaussian") return Quantizer::gaussian(c.sigma2);
  if (c.quantizer == "scalar_lowprec") return Quantizer::scalar_lowprec(c.scale, c.bits);
  if (c.quantizer == "vector_lowprec") return Quantizer::vector_lowprec(c.levels);
  if (c.quantizer == "sparsifier") return Quantizer::sparsifier(Vector::Constant(1, c.sparsify_prob));
  throw ConfigError("key 'quantizer': unknown quantizer '" + c.quantizer + "'");
}

Instance build_instance(const RunConfig& config) {
  validate(config);
  return Instance{build_network(config), build_objective(config), build_quantizer(config)};
}

TheoryParams build_theory_params(const RunConfig& config, const Instance& instance) {
  return theory_params(instance.network.spectrum, instance.objective,
                       variance_class_of(instance.quantizer, instance.objective.p), config.delta, config.c1,
                       config.c2);
}

RunResult run_replication(const RunConfig& config, const Instance& instance, long long T, std::uint64_t replication) {
  const DrawKeys keys{config.seed, replication};
  RunOptions options;
  if (config.x0 != 0.0) options.x0 = Vector::Constant(instance.objective.n * instance.objective.p, config.x0);
  options.record_stride = config.record_stride;
  options.node_objectives = config.node_objectives;
  options.float_bits = config.float_bits;
  const MixingMatrix& w = instance.network.mixing;
  if (config.algorithm == "dgd_quantized") {
    const DgdSchedule schedule =
        config.dgd_schedule == "inverse_sqrt_t" ? DgdSchedule::inverse_sqrt_t : DgdSchedule::inverse_t;
    const double alpha = dgd_stepsize(config.dgd_c, std::max<long long>(T, 1), schedule);
    return run_dgd_quantized(w, instance.objective, instance.quantizer, alpha, T, keys, options);
  }
  if (T == 0) {
    // A zero horizon has no schedule; the trace is just the starting point.
    return run_dgd_quantized(w, instance.objective, instance.quantizer, 0.0, 0, keys, options);
  }
  const StepSchedule schedule = make_schedule(T, config.delta, config.c1, config.c2);
  return run_qdgd(w, instance.objective, instance.quantizer, schedule, keys, options);
}

ConvergenceTrace mean_trace(const std::vector<ConvergenceTrace>& traces) {
  ConvergenceTrace mean;
  if (traces.empty()) return mean;
  mean.records = traces.front().records;
  const double k = static_cast<double>(traces.size());
  for (size_t r = 0; r < mean.records.size(); ++r) {
    TraceRecord sum{};
    sum.node_average_objective = 0.0;
    for (const auto& trace : traces) {
      const TraceRecord& x = trace.records.at(r);
      sum.relative_error += x.relative_error;
      sum.squared_error += x.squared_error;
      sum.max_node_sq_error += x.max_node_sq_error;
      sum.mean_node_sq_error += x.mean_node_sq_error;
      sum.objective += x.objective;
      sum.node_average_objective += x.node_average_objective;
      sum.cumulative_bits += x.cumulative_bits;
    }
    TraceRecord& m = mean.records[r];
    m.relative_error = sum.relative_error / k;
    m.squared_error = sum.squared_error / k;
    m.max_node_sq_error = sum.max_node_sq_error / k;
    m.mean_node_sq_error = sum.mean_node_sq_error / k;
    m.objective = sum.objective / k;
    m.node_average_objective = sum.node_average_objective / k;
    m.cumulative_bits = sum.cumulative_bits / k;
  }
  return mean;
}

ExperimentResult run_experiment(const RunConfig& config) { return run_experiment(config, build_instance(config)); }

ExperimentResult run_experiment(const RunConfig& config, const Instance& instance) {
  validate(config);
  ExperimentResult result;
  result.config = config;
  result.fstar = instance.objective.fstar;
  for (long long T : config.T) {
    HorizonResult h;
    h.T = T;
    for (int r = 0; r < config.replications; ++r) {
      h.replications.push_back(run_replication(config, instance, T, static_cast<std::uint64_t>(r)).trace);
    }
    h.mean = mean_trace(h.replications);
    result.horizons.push_back(std::move(h));
  }
  return result;
}

std::string trace_csv(const ConvergenceTrace& trace) {
  std::string out = kTraceHeader;
  out += "\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.iteration);
    for (double v : {r.relative_error, r.squared_error, r.max_node_sq_error, r.mean_node_sq_error, r.objective,
                     r.node_average_objective, r.cumulative_bits}) {
      out += ",";
      append_double(out, v);
    }
    out += "\n";
  }
  return out;
}

void emit_trace_csv(const ConvergenceTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << trace_csv(trace);
  if (!out) throw DataError("write to '" + path + "' failed");
}

ConvergenceTrace parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw DataError("trace CSV: unexpected header");
  ConvergenceTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw DataError("trace CSV: row " + std::to_string(trace.records.size()) + " is ragged");
    TraceRecord r;
    r.iteration = std::stoll(cells[0]);
    double* slots[] = {&r.relative_error, &r.squared_error, &r.max_node_sq_error, &r.mean_node_sq_error,
                       &r.objective, &r.node_average_objective, &r.cumulative_bits};
    for (size_t k = 0; k < 7; ++k) *slots[k] = std::strtod(cells[k + 1].c_str(), nullptr);
    trace.records.push_back(r);
  }
  return trace;
}

std::string tradeoff_csv(const TradeoffTable& table) {
  std::string out = "s,iterations,code_length_bits,total_cost_bits\n";
  for (const auto& row : table.rows) {
    append_double(out, row.s);
    for (double v : {row.iterations.value, row.code_length, row.total_cost}) {
      out += ",";
      append_double(out, v);
    }
    out += "\n";
  }
  return out;
}

TradeoffTable run_tradeoff(const RunConfig& config, TheoryParams* used) {
  RunConfig c = config;
  c.experiment = "tradeoff";
  validate(c);
  const Network network = build_network(c);
  const ObjectiveSet obj = build_objective(c);
  TheoryParams params =
      theory_params(network.spectrum, obj, RelativeBound{lowprec_eta2(1.0, obj.p)}, c.delta, c.c1, c.c2);
  if (c.anchor_iterations_s1 > 0 && c.anchor_iterations_inf > 0) {
    const auto [c1, c2] = calibrate_tradeoff_constants(params, c.rho, c.anchor_iterations_s1, c.anchor_iterations_inf);
    params.c1 = c1;
    params.c2 = c2;
  }
  std::vector<double> s_values = c.s_values;
  if (s_values.empty()) s_values = {1, 50, 77, 1e3, 1e5, 1e10, 1e15, 1e19};
  if (used != nullptr) *used = params;
  return tradeoff_table(s_values, c.rho, params, c.float_bits);
}

std::string bounds_report_text(const RunConfig& config) {
  const Instance instance = build_instance(config);
  const TheoryParams params = build_theory_params(config, instance);
  const ThresholdReport th = iteration_thresholds(params);
  std::ostringstream out;
  out.precision(10);
  out << "n = " << params.n << "\np = " << params.p << "\nL = " << params.L << "\nmu = " << params.mu
      << "\nbeta = " << params.beta << "\nlambda_min = " << params.lambda_min
      << "\noffdiag_norm = " << params.offdiag_norm << "\nvariance_class = "
      << (is_relative(params.variance) ? "relative" : "constant")
      << "\nvariance = " << variance_constant(params.variance) << "\nD_squared = " << params.d_squared
      << "\nf0 = " << params.f0 << "\nfstar = " << params.fstar << "\nx_star_norm = " << params.x_star_norm
      << "\nB_tilde_squared = " << b_tilde_squared(params) << "\n";
  auto threshold = [&out](const char* name, const Threshold& t) {
    out << name << " = ";
    if (t.saturated) out << "exp(" << t.log_value << ")";
    else out << t.value;
    out << "\n";
  };
  threshold("T1", th.T1);
  threshold("T2", th.T2);
  threshold("T0", th.T0);
  threshold("T1_tilde", th.T1_tilde);
  threshold("T0_tilde", th.T0_tilde);
  for (long long T : config.T) {
    const BoundReport b = bound_report(params, static_cast<double>(std::max<long long>(T, 1)));
    const std::string tag = "[T=" + std::to_string(T) + "] ";
    out << tag << "alpha = " << b.alpha << "\n"
        << tag << "theorem1_bound = " << b.theorem1_bound << "\n"
        << tag << "theorem2_bound = " << b.theorem2_bound << "\n"
        << tag << "lemma1_bound = " << b.lemma1_bound << "\n"
        << tag << "lemma2_bound = " << b.lemma2_bound << "\n"
        << tag << "B1 = " << b.B1 << "\n"
        << tag << "B2 = " << b.B2 << "\n"
        << tag << "e1 = " << b.e1 << "\n"
        << tag << "e2 = " << b.e2 << "\n"
        << tag << "c3_squared = " << b.c3_sq << "\n"
        << tag << "c4_term = " << b.c4_term << "\n";
  }
  return out.str();
}

}  // namespace qdgd
