#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qdgd/objectives.hpp"

namespace qdgd {

/// Label mapping applied on load: keep raw labels, or class k → +1, rest → -1.
struct LabelRule {
  std::optional<double> positive_class;

  static LabelRule parse(const std::string& text);
};

/// Reads delimiter-separated rows of p features followed by one label.
/// `delimiter` == 0 splits on runs of whitespace.
Dataset parse_dataset(const std::string& text, char delimiter, const LabelRule& rule);
Dataset load_dataset(const std::string& path, char delimiter, const LabelRule& rule);

/// Stand-in with the shape of the pen-digits training set: integer features
/// in [0, 100] from ten class prototypes plus noise, labels 0..9.
Dataset generate_digit_like(Index samples, Index p, std::uint64_t seed);

}  // namespace qdgd
