// Command-line front end: run experiments, print bounds and trade-off tables,
// probe quantizers.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

#include "qdgd/config.hpp"
#include "qdgd/errors.hpp"
#include "qdgd/experiment.hpp"
#include "qdgd/presets.hpp"
#include "qdgd/quantizers.hpp"
#include "qdgd/random.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::string out;
  std::vector<std::string> settings;
  bool per_rep = false;
};

void apply(qdgd::RunConfig& c, const Overrides& o) {
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw qdgd::ConfigError("--set expects key=value, got '" + s + "'");
    qdgd::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.reps) c.replications = *o.reps;
  if (!o.out.empty()) c.output = o.out;
  qdgd::validate(c);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qdgd::DataError("cannot write '" + path + "'");
  out << text;
}

int do_tradeoff(const qdgd::RunConfig& c) {
  qdgd::TheoryParams used;
  const auto table = qdgd::run_tradeoff(c, &used);
  const std::string csv = qdgd::tradeoff_csv(table);
  if (!c.output.empty()) write_text(c.output, csv);
  std::cout << csv;
  std::printf("# c1 = %.6g, c2 = %.6g, argmin s = %.6g, min total cost = %.6g bits\n", used.c1, used.c2,
              table.best_s, table.best_cost);
  return 0;
}

int do_bounds(const qdgd::RunConfig& c) {
  const std::string text = qdgd::bounds_report_text(c);
  if (!c.output.empty()) write_text(c.output, text);
  std::cout << text;
  return 0;
}

int do_run(const qdgd::RunConfig& c, bool per_rep) {
  if (c.experiment == "tradeoff") return do_tradeoff(c);
  if (c.experiment == "bounds") return do_bounds(c);
  const auto result = qdgd::run_experiment(c);
  std::printf("T,relative_error,squared_error,objective_minus_fstar,node_average_minus_fstar,cumulative_bits\n");
  for (const auto& h : result.horizons) {
    const auto& last = h.mean.records.back();
    std::printf("%lld,%.6g,%.6g,%.6g,%.6g,%.6g\n", h.T, last.relative_error, last.squared_error,
                last.objective - result.fstar, last.node_average_objective - result.fstar, last.cumulative_bits);
    if (c.output.empty()) continue;
    const std::string base =
        result.horizons.size() == 1 ? c.output : with_suffix(c.output, "_T" + std::to_string(h.T));
    qdgd::emit_trace_csv(h.mean, base);
    if (per_rep) {
      for (size_t r = 0; r < h.replications.size(); ++r) {
        qdgd::emit_trace_csv(h.replications[r], with_suffix(base, "_rep" + std::to_string(r)));
      }
    }
  }
  return 0;
}

// Monte-Carlo probe of one quantizer on a random input.
int do_quantizer_test(const std::string& kind, const std::vector<std::string>& params, std::uint64_t seed) {
  std::map<std::string, double> p = {{"p", 20},    {"draws", 100000}, {"sigma2", 1}, {"levels", 1},
                                     {"scale", 1}, {"bits", 8},       {"q", 0.5}};
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw qdgd::ConfigError("quantizer parameter '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq);
    if (!p.count(key)) throw qdgd::ConfigError("unknown quantizer parameter '" + key + "'");
    try {
      p[key] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw qdgd::ConfigError("invalid value for quantizer parameter '" + key + "'");
    }
  }
  const auto dim = static_cast<qdgd::Index>(p["p"]);
  if (dim < 1) throw qdgd::ConfigError("p must be >= 1");
  qdgd::Quantizer q = qdgd::Quantizer::exact();
  if (kind == "gaussian") q = qdgd::Quantizer::gaussian(p["sigma2"]);
  else if (kind == "scalar_lowprec") q = qdgd::Quantizer::scalar_lowprec(p["scale"], static_cast<int>(p["bits"]));
  else if (kind == "vector_lowprec") q = qdgd::Quantizer::vector_lowprec(static_cast<long long>(p["levels"]));
  else if (kind == "sparsifier") q = qdgd::Quantizer::sparsifier(qdgd::Vector::Constant(1, p["q"]));
  else if (kind != "exact") throw qdgd::ConfigError("unknown quantizer kind '" + kind + "'");

  qdgd::Stream input_rng = qdgd::Stream::keyed(seed, qdgd::StreamDomain::test);
  qdgd::Vector x(dim);
  for (qdgd::Index k = 0; k < dim; ++k) x(k) = input_rng.uniform() * 4.0 - 1.0;
  const auto draws = static_cast<long long>(p["draws"]);
  qdgd::Vector sum = qdgd::Vector::Zero(dim);
  qdgd::Vector sum_sq = qdgd::Vector::Zero(dim);
  double err_sq = 0;
  for (long long d = 0; d < draws; ++d) {
    qdgd::Stream rng = qdgd::Stream::keyed(seed, qdgd::StreamDomain::quantize, {static_cast<std::uint64_t>(d)});
    const qdgd::Vector dev = q.apply(x, rng) - x;
    sum += dev;
    sum_sq += dev.cwiseProduct(dev);
    err_sq += dev.squaredNorm();
  }
  const double nd = static_cast<double>(draws);
  double worst_se = 0;
  for (qdgd::Index k = 0; k < dim; ++k) {
    const double mean = sum(k) / nd;
    const double var = std::max(sum_sq(k) / nd - mean * mean, 0.0);
    if (var > 0) worst_se = std::max(worst_se, std::abs(mean) / std::sqrt(var / nd));
  }
  const auto vc = qdgd::variance_class_of(q, dim);
  const double bound = qdgd::is_relative(vc) ? qdgd::variance_constant(vc) * x.squaredNorm() : qdgd::variance_constant(vc);
  std::printf("quantizer = %s\np = %ld\ndraws = %lld\nmax_bias_standard_errors = %.4f\n", q.name().c_str(),
              static_cast<long>(dim), draws, worst_se);
  std::printf("empirical_variance = %.6g\ndeclared_bound = %.6g\nvariance_class = %s\nbits_per_vector = %.6g\n",
              err_sq / nd, bound, qdgd::is_relative(vc) ? "relative" : "constant", q.code_length_bits(dim, 64));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized decentralized gradient descent simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  std::uint64_t seed_value = 0;
  int reps_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the config seed");
  auto* reps_opt = app.add_option("--reps", reps_value, "Override the replication count");
  app.add_option("--out", o.out, "Output path");
  app.add_option("--set", o.settings, "Extra key=value config assignments");
  app.add_flag("--per-rep", o.per_rep, "Also write one trace per replication");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a config file");
  run->add_option("config", config_path, "Config file")->required();
  auto* tradeoff = app.add_subcommand("tradeoff", "Print the quantization/communication trade-off table");
  tradeoff->add_option("config", config_path, "Config file")->required();
  auto* bounds = app.add_subcommand("bounds", "Print thresholds and bounds for a config");
  bounds->add_option("config", config_path, "Config file")->required();
  std::string kind;
  std::vector<std::string> qparams;
  auto* qtest = app.add_subcommand("quantizer-test", "Monte-Carlo check of a quantizer");
  qtest->add_option("kind", kind, "exact | gaussian | scalar_lowprec | vector_lowprec | sparsifier")->required();
  qtest->add_option("params", qparams, "key=value parameters (p, draws, sigma2, levels, scale, bits, q)");
  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a named preset ('list' prints the names)");
  preset->add_option("name", preset_name, "Preset name")->required();
  auto* show = app.add_subcommand("show-preset", "Print a preset as a config file");
  show->add_option("name", preset_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) o.seed = seed_value;
  if (*reps_opt) o.reps = reps_value;

  try {
    if (*qtest) return do_quantizer_test(kind, qparams, o.seed.value_or(1));
    if (*preset && preset_name == "list") {
      for (const auto& name : qdgd::preset_names()) std::cout << name << "\n";
      return 0;
    }
    qdgd::RunConfig c = (*preset || *show) ? qdgd::preset(preset_name) : qdgd::parse_config(config_path);
    apply(c, o);
    if (*show) {
      std::cout << qdgd::serialize(c);
      return 0;
    }
    if (*tradeoff) return do_tradeoff(c);
    if (*bounds) return do_bounds(c);
    return do_run(c, o.per_rep);
  } catch (const qdgd::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qdgd::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
