#include "qdgd/presets.hpp"

#include <functional>
#include <map>

#include "qdgd/errors.hpp"

namespace qdgd {

namespace {

// c1, c2 below come from tools/tune_constants (coarse grid search).

RunConfig quadratic_base() {
  RunConfig c;
  c.experiment = "quadratic";
  c.graph = "erdos_renyi";
  c.edge_prob = 0.35;
  c.n = 50;
  c.p = 20;
  c.T = {800, 3200};
  c.delta = 0.375;
  c.c1 = 4.0;
  c.c2 = 0.2;
  c.quantizer = "gaussian";
  c.sigma2 = 200;
  c.replications = 100;
  c.record_stride = 100;
  return c;
}

RunConfig quadratic_sigma(double sigma2) {
  RunConfig c = quadratic_base();
  c.sigma2 = sigma2;
  return c;
}

// Each topology gets its own constants: minimizers of the mean relative error
// at T = 3200 over the grid c1 in {0.5, ..., 3}, c2 in {0.3, ..., 1}.
RunConfig quadratic_edge_prob(double edge_prob, double c1, double c2) {
  RunConfig c = quadratic_base();
  if (edge_prob >= 1.0) c.graph = "complete";
  c.edge_prob = edge_prob;
  c.c1 = c1;
  c.c2 = c2;
  return c;
}

RunConfig ridge_base() {
  RunConfig c;
  c.experiment = "ridge";
  c.n = 50;
  c.p = 16;
  c.samples = 5000;
  c.lambda = 2.0;
  c.label_rule = "class:0";
  c.graph = "erdos_renyi";
  c.edge_prob = 0.25;
  c.quantizer = "vector_lowprec";
  c.levels = 1;
  c.delta = 0.275;
  c.c1 = 1.0;
  c.c2 = 1e-6;
  c.T = {1000, 4000};
  c.replications = 20;
  c.record_stride = 100;
  return c;
}

RunConfig ridge_delta(double delta) {
  RunConfig c = ridge_base();
  c.delta = delta;
  return c;
}

RunConfig ridge_graph(const std::string& graph, double edge_prob) {
  RunConfig c = ridge_base();
  c.graph = graph;
  c.edge_prob = edge_prob;
  return c;
}

RunConfig logistic_base(const std::string& algorithm, long long levels) {
  RunConfig c;
  c.experiment = "logistic";
  c.n = 50;
  c.p = 4;
  c.samples = 5000;
  c.class_mean = 3.0;
  c.class_var = 1.0;
  c.lambda = 1.0;
  c.graph = "erdos_renyi";
  c.edge_prob = 0.45;
  c.quantizer = "vector_lowprec";
  c.levels = levels;
  c.delta = 0.45;
  c.c1 = 1.0;
  c.c2 = 3.0;
  c.algorithm = algorithm;
  // picked by smallest worst-case loss over the horizon grid
  c.dgd_c = 1.0;
  c.dgd_schedule = "inverse_t";
  c.T = {750, 1000, 1250, 1500, 1750};
  c.replications = 20;
  c.record_stride = 1000000;
  c.node_objectives = true;
  return c;
}

RunConfig tradeoff_levels() {
  RunConfig c;
  c.experiment = "tradeoff";
  c.n = 50;
  c.p = 200;
  c.graph = "erdos_renyi";
  c.edge_prob = 0.35;
  c.noise_std = 0.31622776601683794;
  c.delta = 0.1;
  c.rho = 1e-2;
  c.float_bits = 64;
  c.quantizer = "vector_lowprec";
  c.s_values = {1, 50, 77, 1e3, 1e5, 1e10, 1e15, 1e19};
  c.anchor_iterations_s1 = 1.08e6;
  c.anchor_iterations_inf = 878.0;
  return c;
}

const std::map<std::string, std::function<RunConfig()>>& registry() {
  static const std::map<std::string, std::function<RunConfig()>> table = {
      {"quadratic-sigma2", [] { return quadratic_sigma(2); }},
      {"quadratic-sigma20", [] { return quadratic_sigma(20); }},
      {"quadratic-sigma200", [] { return quadratic_sigma(200); }},
      {"quadratic-pc0.35", [] { return quadratic_edge_prob(0.35, 1.5, 0.4); }},
      {"quadratic-pc0.5", [] { return quadratic_edge_prob(0.5, 1.5, 0.5); }},
      {"quadratic-pc1", [] { return quadratic_edge_prob(1.0, 1.0, 0.6); }},
      {"ridge-delta0.175", [] { return ridge_delta(0.175); }},
      {"ridge-delta0.275", [] { return ridge_delta(0.275); }},
      {"ridge-pc0.25", [] { return ridge_graph("erdos_renyi", 0.25); }},
      {"ridge-pc0.45", [] { return ridge_graph("erdos_renyi", 0.45); }},
      {"ridge-complete", [] { return ridge_graph("complete", 1.0); }},
      {"ridge-cycle", [] { return ridge_graph("cycle", 1.0); }},
      {"logistic-qdgd-s1", [] { return logistic_base("qdgd", 1); }},
      {"logistic-qdgd-s20", [] { return logistic_base("qdgd", 20); }},
      {"logistic-dgd-s1", [] { return logistic_base("dgd_quantized", 1); }},
      {"logistic-dgd-s20", [] { return logistic_base("dgd_quantized", 20); }},
      {"tradeoff-levels", [] { return tradeoff_levels(); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : registry()) names.push_back(name);
  return names;
}

RunConfig preset(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second();
}

}  // namespace qdgd
