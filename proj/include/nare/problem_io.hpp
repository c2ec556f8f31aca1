#pragma once

#include <iosfwd>
#include <string>

#include "nare/classify.hpp"

namespace nare {

/// JSON layout: {"m": .., "n": .., "omega": .., "A": [[[re, im], ...], ...], "B": .., "C": .., "D": ..}.
/// Doubles are written with 17 significant digits, so a round trip is exact.
std::string problem_to_json(const NareProblem& p);
NareProblem problem_from_json(const std::string& text);

/// Throws IoError on file or parse failures and BadParam on inconsistent data.
void write_problem(const std::string& path, const NareProblem& p);
NareProblem read_problem(const std::string& path);

std::string matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const std::string& text);

void write_matrix(const std::string& path, const CMatrix& m);

}  // namespace nare
