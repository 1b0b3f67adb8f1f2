#pragma once

#include <string>

#include "ibrt/probability.hpp"

namespace ibrt {

/// Parses {"p_x": [...], "p_y_given_x": [[row for y0], [row for y1], ...]}.
/// Throws InputError with a parse or validation diagnostic.
IBProblem parse_problem_json(const std::string& text);

IBProblem load_problem_file(const std::string& path);

/// Serializes a problem to the same JSON schema.
std::string problem_to_json(const IBProblem& prob);

}  // namespace ibrt
