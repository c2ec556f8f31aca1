#include "nare/bench.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "nare/error.hpp"
#include "nare/generators.hpp"

namespace nare {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Method> methods_of(std::initializer_list<const char*> names) {
  std::vector<Method> out;
  for (const char* n : names) out.push_back(parse_method(n));
  return out;
}

const std::vector<Method>& grid71_methods() {
  static const auto v = methods_of(
      {"Newton", "TFP", "SDA", "ADDAn", "SDAn", "DAn", "pSDA", "pADDAn", "pSDAn", "pDAn"});
  return v;
}

const std::vector<Method>& grid72_methods() {
  static const auto v = methods_of({"Newton", "TFP", "ADDA", "SDA", "ADDAn", "SDAn", "DAn",
                                    "pADDA", "pSDA", "pADDAn", "pSDAn", "pDAn"});
  return v;
}

struct Row71 {
  double u, omega, xi, eta;
};

// (u, omega, xi, eta) rows of the Example 7.1 grid.
constexpr Row71 kGrid71[] = {
    {0.01, 0.0, -5, 1.05}, {0.01, 0.1, -3, 1.5}, {0.01, 0.5, -1, 4},
    {0.01, 0.9, 0, 11},    {0.01, 1.0, 1.05, -5}, {0.1, 0.0, -10, 1.2},
    {0.1, 0.1, -5, 2},     {0.1, 0.5, -1, 5},    {0.1, 0.9, 0, 12},
    {0.1, 1.0, 1.2, -10},  {1.0, 0.0, -50, 2.01}, {1.0, 0.1, -10, 5},
    {1.0, 0.5, -2, 7},     {1.0, 0.9, 0, 21},    {1.0, 1.0, 2.01, -50},
};

struct Row72 {
  double omega, eta;  // eta >= 0; nonzero values run with both signs
};

constexpr Row72 kGrid72[] = {
    {0.0, 20},   {0.0, 10},  {0.0, 5},    {0.0, 0},   {0.1, 8},    {0.1, 4},
    {0.1, 1},    {0.1, 0},   {0.5, 0.45}, {0.5, 0.3}, {0.5, 0.15}, {0.5, 0},
    {0.9, 0.35}, {0.9, 0.2}, {0.9, 0.05}, {0.9, 0},
};

BenchCase case71(Index n, double omega, double xi, double eta, double u,
                 const std::vector<Method>& ms) {
  return BenchCase{"7.1", n, omega, xi, eta, u, ms};
}

BenchCase case72(Index n, double omega, double eta, const std::vector<Method>& ms) {
  return BenchCase{"7.2", n, omega, kNaN, eta, kNaN, ms};
}

void add72(std::vector<BenchCase>& out, Index n, double omega, double eta,
           const std::vector<Method>& ms) {
  out.push_back(case72(n, omega, eta, ms));
  if (eta != 0.0) out.push_back(case72(n, omega, -eta, ms));
}

}  // namespace

NareProblem bench_problem(const BenchCase& c) {
  if (c.example == "7.1") return gen_example_71(c.n, c.xi, c.eta, c.u, c.omega);
  if (c.example == "7.2") return gen_example_72(c.n, c.eta, c.omega);
  throw BadParam("unknown example: " + c.example);
}

std::vector<BenchCase> bench_preset(const std::string& name, const std::string& example, Index n) {
  if (!example.empty() && example != "7.1" && example != "7.2") {
    throw BadParam("unknown example: " + example);
  }
  const bool want71 = example.empty() || example == "7.1";
  const bool want72 = example.empty() || example == "7.2";
  std::vector<BenchCase> out;
  if (name == "full") {
    if (want71)
      for (const Row71& r : kGrid71) out.push_back(case71(n, r.omega, r.xi, r.eta, r.u, grid71_methods()));
    if (want72)
      for (const Row72& r : kGrid72) add72(out, n, r.omega, r.eta, grid72_methods());
    return out;
  }
  if (name == "acceptance") {
    if (want71) {
      const auto ms = methods_of({"SDA", "ADDAn", "SDAn", "DAn", "pSDA", "pADDAn", "pSDAn", "pDAn"});
      out.push_back(case71(n, 0.0, -5, 1.05, 0.01, ms));
      out.push_back(case71(n, 0.5, -1, 4, 0.01, ms));
      out.push_back(case71(n, 1.0, 1.05, -5, 0.01, ms));
      out.push_back(case71(n, 0.5, -2, 7, 1.0, ms));
    }
    if (want72) {
      std::vector<Method> ms(grid72_methods().begin() + 2, grid72_methods().end());
      out.push_back(case72(n, 0.5, 0.0, grid72_methods()));
      add72(out, n, 0.5, 0.15, ms);
      out.push_back(case72(n, 0.0, 0.0, ms));
      out.push_back(case72(n, 0.1, 0.0, ms));
      out.push_back(case72(n, 0.9, 0.0, ms));
    }
    return out;
  }
  throw BadParam("unknown preset: " + name);
}

std::vector<BenchCase> bench_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("malformed grid file: ") + e.what());
  }
  if (!j.contains("cases") || !j["cases"].is_array()) throw BadParam("grid file lacks \"cases\"");
  std::vector<BenchCase> out;
  for (const json& c : j["cases"]) try {
    BenchCase bc;
    bc.example = c.at("example").get<std::string>();
    bc.n = c.at("n").get<Index>();
    bc.omega = c.at("omega").get<double>();
    bc.eta = c.at("eta").get<double>();
    bc.xi = c.contains("xi") ? c["xi"].get<double>() : kNaN;
    bc.u = c.contains("u") ? c["u"].get<double>() : kNaN;
    if (c.contains("methods")) {
      for (const json& m : c["methods"]) bc.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (bc.example != "7.1" && bc.example != "7.2") throw BadParam("unknown example: " + bc.example);
    out.push_back(std::move(bc));
  } catch (const json::exception& e) {
    throw BadParam(std::string("grid file case: ") + e.what());
  }
  return out;
}

namespace {

BenchRow run_cell(const BenchCase& c, const NareProblem* p, const std::string& setup_error,
                  Method m, const MethodOptions& opts) {
  BenchRow row{c.example, c.n,  c.omega, c.xi, c.eta, c.u, method_name(m), 0, kNaN, 0.0,
               kNaN,      kNaN, kNaN,    kNaN, ""};
  if (p == nullptr) {
    row.status = "Error: " + setup_error;
    return row;
  }
  try {
    const MethodRun run = run_method(*p, m, opts);
    row.it = run.result.iterations;
    row.nres = run.result.nres_history.empty() ? kNaN : run.result.final_nres();
    row.seconds = run.seconds;
    if (run.params) {
      row.param_t = run.params->t;
      row.param_gamma = run.params->gamma;
      row.vartheta = run.params->diagnostics.vartheta.value_or(kNaN);
      row.c_star = run.params->diagnostics.c_star.value_or(kNaN);
    }
    row.status = stop_reason_name(run.result.stop_reason);
  } catch (const std::exception& e) {
    row.status = std::string("Error: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const std::vector<BenchCase>& cases, const MethodOptions& opts,
                                int jobs, const BenchProgress& progress) {
  struct Cell {
    size_t case_index;
    Method method;
  };
  std::vector<Cell> cells;
  for (size_t i = 0; i < cases.size(); ++i)
    for (Method m : cases[i].methods) cells.push_back({i, m});

  // Problems are built lazily, once per case.
  std::vector<std::unique_ptr<NareProblem>> problems(cases.size());
  std::vector<std::string> setup_errors(cases.size());
  std::vector<std::once_flag> built(cases.size());
  auto problem_for = [&](size_t i) -> const NareProblem* {
    std::call_once(built[i], [&] {
      try {
        problems[i] = std::make_unique<NareProblem>(bench_problem(cases[i]));
      } catch (const std::exception& e) {
        setup_errors[i] = e.what();
      }
    });
    return problems[i].get();
  };

  std::vector<BenchRow> rows(cells.size());
  std::mutex report;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < cells.size(); k = next++) {
      const Cell& cell = cells[k];
      const NareProblem* p = problem_for(cell.case_index);
      rows[k] = run_cell(cases[cell.case_index], p, setup_errors[cell.case_index], cell.method, opts);
      if (progress) {
        std::lock_guard<std::mutex> lock(report);
        progress(rows[k]);
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s) {
  if (s.empty()) return kNaN;
  size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw BadParam("bad number in CSV: " + s);
  return v;
}

// Status may contain commas; it is the last column and quoted when needed.
std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string bench_csv_header() {
  return "example,n,omega,xi,eta,u,method,it,nres,seconds,param_t,param_gamma,vartheta,c_star,"
         "status";
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << bench_csv_header() << '\n';
  for (const BenchRow& r : rows) {
    os << r.example << ',' << r.n << ',' << fmt(r.omega) << ',' << fmt(r.xi) << ',' << fmt(r.eta)
       << ',' << fmt(r.u) << ',' << r.method << ',' << r.it << ',' << fmt(r.nres) << ','
       << fmt(r.seconds) << ',' << fmt(r.param_t) << ',' << fmt(r.param_gamma) << ','
       << fmt(r.vartheta) << ',' << fmt(r.c_star) << ',' << quote(r.status) << '\n';
  }
  return os.str();
}

std::vector<BenchRow> parse_bench_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != bench_csv_header()) {
    throw BadParam("CSV header does not match the bench layout");
  }
  std::vector<BenchRow> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 15) throw BadParam("CSV row has " + std::to_string(f.size()) + " fields");
    BenchRow r;
    r.example = f[0];
    r.n = std::stol(f[1]);
    r.omega = parse_num(f[2]);
    r.xi = parse_num(f[3]);
    r.eta = parse_num(f[4]);
    r.u = parse_num(f[5]);
    r.method = f[6];
    r.it = std::stoi(f[7]);
    r.nres = parse_num(f[8]);
    r.seconds = parse_num(f[9]);
    r.param_t = parse_num(f[10]);
    r.param_gamma = parse_num(f[11]);
    r.vartheta = parse_num(f[12]);
    r.c_star = parse_num(f[13]);
    r.status = f[14];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nare
