#pragma once

#include <filesystem>
#include <string>

#include "varw/model.hpp"

namespace varw {

/// Parses a model document:
///
///   {
///     "kernel": [[0.0, 0.5], [0.4, 0.0]],   // row-major, |V| rows of |V| entries
///     "lambda": [1.0, 1.0],
///     "sigma":  [0.2, 0.3],
///     "nu":     [0.5, 0.3],
///     "labels": ["a", "b"]                  // optional
///   }
///
/// Unknown keys, missing keys and non-numeric entries are rejected with a
/// ModelError. Parsing does not run validate_model.
ModelParams parse_model(const std::string& text);

ModelParams load_model(const std::filesystem::path& path);

std::string dump_model(const ModelParams& params);

}  // namespace varw
