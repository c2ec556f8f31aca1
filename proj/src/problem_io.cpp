#include "nare/problem_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "nare/error.hpp"

namespace nare {

using nlohmann::json;

namespace {

json to_j(const CMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix from_j(const json& j, const char* name) {
  auto bad = [name](const std::string& why) {
    return BadParam(std::string("matrix ") + name + ": " + why);
  };
  if (!j.is_array() || j.empty()) throw bad("expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array()) throw bad("rows must be arrays");
  const Index cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw bad("ragged rows");
    for (Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw bad("entries must be [re, im] number pairs");
      }
      m(i, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string problem_to_json(const NareProblem& p) {
  json j;
  j["m"] = p.m();
  j["n"] = p.n();
  j["omega"] = p.omega;
  j["A"] = to_j(p.A);
  j["B"] = to_j(p.B);
  j["C"] = to_j(p.C);
  j["D"] = to_j(p.D);
  // nlohmann prints doubles with max_digits10, which round-trips exactly.
  return j.dump(1);
}

NareProblem problem_from_json(const std::string& text) {
  const json j = parse(text);
  for (const char* key : {"m", "n", "omega", "A", "B", "C", "D"}) {
    if (!j.contains(key)) throw BadParam(std::string("problem file lacks \"") + key + "\"");
  }
  NareProblem p;
  p.A = from_j(j["A"], "A");
  p.B = from_j(j["B"], "B");
  p.C = from_j(j["C"], "C");
  p.D = from_j(j["D"], "D");
  p.omega = j["omega"].get<double>();
  if (j["m"].get<Index>() != p.m() || j["n"].get<Index>() != p.n()) {
    throw BadParam("problem header sizes do not match the matrices");
  }
  p.validate();
  return p;
}

void write_problem(const std::string& path, const NareProblem& p) {
  spill(path, problem_to_json(p));
}

NareProblem read_problem(const std::string& path) { return problem_from_json(slurp(path)); }

std::string matrix_to_json(const CMatrix& m) { return to_j(m).dump(); }

CMatrix matrix_from_json(const std::string& text) { return from_j(parse(text), "X"); }

void write_matrix(const std::string& path, const CMatrix& m) { spill(path, matrix_to_json(m)); }

}  // namespace nare
