#include "qdgd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "qdgd/errors.hpp"
#include "qdgd/random.hpp"

namespace qdgd {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  if (delimiter == 0) {
    std::istringstream in(line);
    std::string cell;
    while (in >> cell) cells.push_back(cell);
    return cells;
  }
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

double parse_cell(std::string cell, size_t row, size_t column) {
  cell.erase(0, cell.find_first_not_of(" \t"));
  cell.erase(cell.find_last_not_of(" \t\r") + 1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "row " << row << ", column " << column << ": '" << cell << "' is not a number";
    throw DataError(msg.str());
  }
  return v;
}

}  // namespace

LabelRule LabelRule::parse(const std::string& text) {
  if (text == "none" || text.empty()) return {};
  if (text.rfind("class:", 0) == 0) {
    const std::string k = text.substr(6);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), v);
    if (k.empty() || ec != std::errc() || ptr != k.data() + k.size()) {
      throw ConfigError("label rule '" + text + "': class must be a number");
    }
    return LabelRule{v};
  }
  throw ConfigError("label rule '" + text + "' is not 'none' or 'class:<k>'");
}

Dataset parse_dataset(const std::string& text, char delimiter, const LabelRule& rule) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  size_t width = 0;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = split(line, delimiter);
    if (rows.empty()) {
      width = cells.size();
      if (width < 2) throw DataError("row 0: need at least one feature and a label");
    } else if (cells.size() != width) {
      std::ostringstream msg;
      msg << "row " << row << ": " << cells.size() << " cells, expected " << width;
      throw DataError(msg.str());
    }
    std::vector<double> values;
    for (size_t c = 0; c < cells.size(); ++c) values.push_back(parse_cell(cells[c], row, c));
    rows.push_back(std::move(values));
    ++row;
  }
  if (rows.empty()) throw DataError("dataset is empty");
  Dataset data{Matrix(static_cast<Index>(rows.size()), static_cast<Index>(width - 1)),
               Vector(static_cast<Index>(rows.size()))};
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c + 1 < width; ++c) data.features(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    const double label = rows[r].back();
    data.labels(static_cast<Index>(r)) = rule.positive_class ? (label == *rule.positive_class ? 1.0 : -1.0) : label;
  }
  return data;
}

Dataset load_dataset(const std::string& path, char delimiter, const LabelRule& rule) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), delimiter, rule);
}

Dataset generate_digit_like(Index samples, Index p, std::uint64_t seed) {
  constexpr int kClasses = 10;
  Stream proto_rng = Stream::keyed(seed, StreamDomain::dataset, {1});
  Matrix prototypes(kClasses, p);
  for (Index c = 0; c < kClasses; ++c)
    for (Index k = 0; k < p; ++k) prototypes(c, k) = 100.0 * proto_rng.uniform();
  Stream rng = Stream::keyed(seed, StreamDomain::dataset, {2});
  Dataset data{Matrix(samples, p), Vector(samples)};
  for (Index j = 0; j < samples; ++j) {
    const Index c = static_cast<Index>(rng() % kClasses);
    data.labels(j) = static_cast<double>(c);
    for (Index k = 0; k < p; ++k) {
      data.features(j, k) = std::clamp(std::round(prototypes(c, k) + 12.0 * rng.normal()), 0.0, 100.0);
    }
  }
  return data;
}

}  // namespace qdgd
