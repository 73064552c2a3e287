#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qdgd {

/// Flat key = value experiment description. Every key has a default, so a
/// file only needs the keys it changes.
struct RunConfig {
  std::string experiment = "quadratic";  // quadratic | least_squares | ridge | logistic | tradeoff | bounds
  std::string graph = "erdos_renyi";     // erdos_renyi | complete | cycle
  double edge_prob = 0.35;
  int n = 50;
  long long p = 20;
  std::vector<long long> T = {800};
  double delta = 0.375;
  double c1 = 1.0;
  double c2 = 1.0;
  std::uint64_t seed = 1;
  int replications = 1;

  std::string quantizer = "gaussian";  // exact | gaussian | scalar_lowprec | vector_lowprec | sparsifier
  double sigma2 = 0.0;
  long long levels = 1;
  double scale = 1.0;
  int bits = 8;
  double sparsify_prob = 1.0;
  int float_bits = 64;

  std::string algorithm = "qdgd";  // qdgd | dgd_quantized
  double dgd_c = 1.0;
  std::string dgd_schedule = "inverse_t";  // inverse_t | inverse_sqrt_t

  std::string dataset;  // path; empty selects a generated dataset
  std::string delimiter = ",";
  std::string label_rule = "none";  // none | class:<k>
  double lambda = 1.0;
  double noise_std = 0.31622776601683794;
  long long samples = 5000;
  double class_mean = 3.0;
  double class_var = 1.0;
  double x0 = 0.0;  // every entry of the initial stacked iterate

  double rho = 1e-2;
  std::vector<double> s_values;
  double anchor_iterations_s1 = 0.0;   // tradeoff calibration, off when either anchor is 0
  double anchor_iterations_inf = 0.0;

  long long record_stride = 1;
  bool node_objectives = false;
  std::string output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError naming the key (and line, when parsing) on failure.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Applies one "key=value" assignment on top of an existing config.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

void validate(const RunConfig& config);

std::string serialize(const RunConfig& config);

}  // namespace qdgd
