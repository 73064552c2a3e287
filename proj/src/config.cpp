#include "qdgd/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qdgd/errors.hpp"

namespace qdgd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename Number>
Number parse_number(const std::string& key, const std::string& text) {
  Number v{};
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  }
  return v;
}

template <typename Number>
std::vector<Number> parse_list(const std::string& key, const std::string& text) {
  std::vector<Number> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<Number>(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value");
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid value '" + text + "' for key '" + key + "' (expected true or false)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Number>
std::string format_list(const std::vector<Number>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<Number>) out += format_double(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename Member>
Field field(Member RunConfig::*member) {
  Field f;
  f.set = [member](RunConfig& c, const std::string& key, const std::string& value) {
    using T = Member;
    if constexpr (std::is_same_v<T, std::string>) c.*member = value;
    else if constexpr (std::is_same_v<T, bool>) c.*member = parse_bool(key, value);
    else if constexpr (std::is_same_v<T, std::vector<long long>>) c.*member = parse_list<long long>(key, value);
    else if constexpr (std::is_same_v<T, std::vector<double>>) c.*member = parse_list<double>(key, value);
    else c.*member = parse_number<T>(key, value);
  };
  f.get = [member](const RunConfig& c) -> std::string {
    using T = Member;
    if constexpr (std::is_same_v<T, std::string>) return c.*member;
    else if constexpr (std::is_same_v<T, bool>) return c.*member ? "true" : "false";
    else if constexpr (std::is_same_v<T, std::vector<long long>> || std::is_same_v<T, std::vector<double>>)
      return format_list(c.*member);
    else if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
    else return std::to_string(c.*member);
  };
  return f;
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"experiment", field(&RunConfig::experiment)},
      {"graph", field(&RunConfig::graph)},
      {"edge_prob", field(&RunConfig::edge_prob)},
      {"n", field(&RunConfig::n)},
      {"p", field(&RunConfig::p)},
      {"T", field(&RunConfig::T)},
      {"delta", field(&RunConfig::delta)},
      {"c1", field(&RunConfig::c1)},
      {"c2", field(&RunConfig::c2)},
      {"seed", field(&RunConfig::seed)},
      {"replications", field(&RunConfig::replications)},
      {"quantizer", field(&RunConfig::quantizer)},
      {"sigma2", field(&RunConfig::sigma2)},
      {"levels", field(&RunConfig::levels)},
      {"scale", field(&RunConfig::scale)},
      {"bits", field(&RunConfig::bits)},
      {"sparsify_prob", field(&RunConfig::sparsify_prob)},
      {"float_bits", field(&RunConfig::float_bits)},
      {"algorithm", field(&RunConfig::algorithm)},
      {"dgd_c", field(&RunConfig::dgd_c)},
      {"dgd_schedule", field(&RunConfig::dgd_schedule)},
      {"dataset", field(&RunConfig::dataset)},
      {"delimiter", field(&RunConfig::delimiter)},
      {"label_rule", field(&RunConfig::label_rule)},
      {"lambda", field(&RunConfig::lambda)},
      {"noise_std", field(&RunConfig::noise_std)},
      {"samples", field(&RunConfig::samples)},
      {"class_mean", field(&RunConfig::class_mean)},
      {"class_var", field(&RunConfig::class_var)},
      {"x0", field(&RunConfig::x0)},
      {"rho", field(&RunConfig::rho)},
      {"s_values", field(&RunConfig::s_values)},
      {"anchor_iterations_s1", field(&RunConfig::anchor_iterations_s1)},
      {"anchor_iterations_inf", field(&RunConfig::anchor_iterations_inf)},
      {"record_stride", field(&RunConfig::record_stride)},
      {"node_objectives", field(&RunConfig::node_objectives)},
      {"output", field(&RunConfig::output)},
  };
  return table;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return true;
  }
  return false;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, f] : fields()) {
    if (name == key) {
      f.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::map<std::string, int> key_lines;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      apply_setting(config, key, trim(line.substr(eq + 1)));
      key_lines[key] = number;
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  try {
    validate(config);
  } catch (const ConfigError& e) {
    // Messages look like "key 'name': ..."; point at the line that set it.
    const std::string msg = e.what();
    const auto open = msg.find('\'');
    const auto close = open == std::string::npos ? open : msg.find('\'', open + 1);
    if (close != std::string::npos) {
      const auto it = key_lines.find(msg.substr(open + 1, close - open - 1));
      if (it != key_lines.end()) throw ConfigError("line " + std::to_string(it->second) + ": " + msg);
    }
    throw;
  }
  return config;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError("key '" + key + "': " + why); };
  if (!one_of(c.experiment, {"quadratic", "least_squares", "ridge", "logistic", "tradeoff", "bounds"}))
    fail("experiment", "unknown experiment '" + c.experiment + "'");
  if (!one_of(c.graph, {"erdos_renyi", "complete", "cycle"})) fail("graph", "unknown graph '" + c.graph + "'");
  if (!(c.edge_prob > 0 && c.edge_prob <= 1)) fail("edge_prob", "must lie in (0, 1]");
  if (c.n < 2) fail("n", "must be >= 2");
  if (c.p < 1) fail("p", "must be >= 1");
  if (c.T.empty()) fail("T", "needs at least one horizon");
  for (long long t : c.T) {
    if (t < 0) fail("T", "horizons must be >= 0");
  }
  if (!(c.delta > 0 && c.delta < 0.5)) fail("delta", "must lie in (0, 1/2)");
  if (!(c.c1 > 0)) fail("c1", "must be > 0");
  if (!(c.c2 > 0)) fail("c2", "must be > 0");
  if (c.replications < 1) fail("replications", "must be >= 1");
  if (!one_of(c.quantizer, {"exact", "gaussian", "scalar_lowprec", "vector_lowprec", "sparsifier"}))
    fail("quantizer", "unknown quantizer '" + c.quantizer + "'");
  if (!(c.sigma2 >= 0)) fail("sigma2", "must be >= 0");
  if (c.levels < 1) fail("levels", "must be >= 1");
  if (!(c.scale > 0)) fail("scale", "must be > 0");
  if (c.bits < 1 || c.bits > 62) fail("bits", "must lie in [1, 62]");
  if (!(c.sparsify_prob > 0 && c.sparsify_prob <= 1)) fail("sparsify_prob", "must lie in (0, 1]");
  if (c.float_bits < 1) fail("float_bits", "must be >= 1");
  if (!one_of(c.algorithm, {"qdgd", "dgd_quantized"})) fail("algorithm", "unknown algorithm '" + c.algorithm + "'");
  if (!(c.dgd_c > 0)) fail("dgd_c", "must be > 0");
  if (!one_of(c.dgd_schedule, {"inverse_t", "inverse_sqrt_t"})) fail("dgd_schedule", "unknown schedule");
  if (c.delimiter.size() != 1 && c.delimiter != "whitespace") fail("delimiter", "must be one character or 'whitespace'");
  if (c.label_rule != "none" && c.label_rule.rfind("class:", 0) != 0) fail("label_rule", "must be none or class:<k>");
  if (!(c.lambda > 0)) fail("lambda", "must be > 0");
  if (!(c.noise_std >= 0)) fail("noise_std", "must be >= 0");
  if (c.samples < 2) fail("samples", "must be >= 2");
  if (!(c.class_var >= 0)) fail("class_var", "must be >= 0");
  if (!(c.rho > 0)) fail("rho", "must be > 0");
  for (double s : c.s_values) {
    if (!(s >= 1)) fail("s_values", "levels must be >= 1");
  }
  if (c.record_stride < 1) fail("record_stride", "must be >= 1");
}

std::string serialize(const RunConfig& config) {
  std::string out;
  for (const auto& [name, f] : fields()) {
    const std::string value = f.get(config);
    if (value.empty()) continue;
    out += name + " = " + value + "\n";
  }
  return out;
}

}  // namespace qdgd
