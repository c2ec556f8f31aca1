#include "nare/methods.hpp"

#include <chrono>

#include "nare/error.hpp"
#include "nare/params.hpp"

namespace nare {

namespace {

struct Entry {
  Method m;
  const char* name;
};

constexpr Entry kTable[] = {
    {Method::Newton, "Newton"}, {Method::TFP, "TFP"},       {Method::JFP, "JFP"},
    {Method::GSFP1, "GSFP1"},   {Method::GSFP2, "GSFP2"},   {Method::GSFP3, "GSFP3"},
    {Method::GSFP4, "GSFP4"},   {Method::SORFP1, "SORFP1"}, {Method::SORFP2, "SORFP2"},
    {Method::SORFP3, "SORFP3"}, {Method::SORFP4, "SORFP4"}, {Method::AORFP1, "AORFP1"},
    {Method::AORFP2, "AORFP2"}, {Method::AORFP3, "AORFP3"}, {Method::AORFP4, "AORFP4"},
    {Method::SDA, "SDA"},       {Method::ADDA, "ADDA"},     {Method::SDAn, "SDAn"},
    {Method::ADDAn, "ADDAn"},   {Method::DAn, "DAn"},       {Method::pSDA, "pSDA"},
    {Method::pADDA, "pADDA"},   {Method::pSDAn, "pSDAn"},   {Method::pADDAn, "pADDAn"},
    {Method::pDAn, "pDAn"},
};

SplitKind split_kind(Method m) {
  switch (m) {
    case Method::TFP: return SplitKind::TFP;
    case Method::JFP: return SplitKind::JFP;
    case Method::GSFP1: return SplitKind::GSFP1;
    case Method::GSFP2: return SplitKind::GSFP2;
    case Method::GSFP3: return SplitKind::GSFP3;
    case Method::GSFP4: return SplitKind::GSFP4;
    case Method::SORFP1: return SplitKind::SORFP1;
    case Method::SORFP2: return SplitKind::SORFP2;
    case Method::SORFP3: return SplitKind::SORFP3;
    case Method::SORFP4: return SplitKind::SORFP4;
    case Method::AORFP1: return SplitKind::AORFP1;
    case Method::AORFP2: return SplitKind::AORFP2;
    case Method::AORFP3: return SplitKind::AORFP3;
    case Method::AORFP4: return SplitKind::AORFP4;
    default: throw BadParam(std::string(method_name(m)) + " is not a fixed-point method");
  }
}

}  // namespace

const char* method_name(Method m) {
  for (const Entry& e : kTable)
    if (e.m == m) return e.name;
  return "?";
}

Method parse_method(const std::string& name) {
  for (const Entry& e : kTable)
    if (name == e.name) return e.m;
  throw BadParam("unknown method: " + name);
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> v = [] {
    std::vector<Method> out;
    for (const Entry& e : kTable) out.push_back(e.m);
    return out;
  }();
  return v;
}

bool is_doubling(Method m) { return static_cast<int>(m) >= static_cast<int>(Method::SDA); }

ParamChoice choose_params(const NareProblem& p, Method m, double zeta) {
  switch (m) {
    case Method::SDA: return immediate_params(p, DoublingMode::SDA);
    case Method::ADDA: return immediate_params(p, DoublingMode::ADDA);
    case Method::pSDA: return preprocessed_params(p, DoublingMode::SDA);
    case Method::pADDA: return preprocessed_params(p, DoublingMode::ADDA);
    case Method::SDAn: return refined_params(p, RefinedMode::SDAn, zeta, false);
    case Method::ADDAn: return refined_params(p, RefinedMode::ADDAn, zeta, false);
    case Method::DAn: return refined_params(p, RefinedMode::DAn, zeta, false);
    case Method::pSDAn: return refined_params(p, RefinedMode::SDAn, zeta, true);
    case Method::pADDAn: return refined_params(p, RefinedMode::ADDAn, zeta, true);
    case Method::pDAn: return refined_params(p, RefinedMode::DAn, zeta, true);
    default: throw BadParam(std::string(method_name(m)) + " is not a doubling method");
  }
}

MethodRun run_method(const NareProblem& p, Method m, const MethodOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  MethodRun run;
  if (m == Method::Newton) {
    run.result = newton_solve(p, opts.max_iter.value_or(50), opts.tol, opts.sylvester);
  } else if (!is_doubling(m)) {
    Splitting s{split_kind(m), opts.sor_omega, opts.aor_gamma};
    run.result = fixedpoint_solve(p, s, opts.max_iter.value_or(10000), opts.tol, opts.sylvester);
  } else {
    ParamChoice pc;
    try {
      pc = choose_params(p, m, opts.zeta);
    } catch (const Error& e) {
      run.result.phi = CMatrix::Zero(p.m(), p.n());
      run.result.stop_reason = StopReason::LinAlgFailure;
      run.result.failure = std::string("parameter selection: ") + e.what();
      run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return run;
    }
    DoublingResult dr = doubling_solve(p, pc, opts.max_iter.value_or(60), opts.tol);
    run.result = std::move(dr.result);
    run.params = std::move(dr.params);
    run.psi = std::move(dr.psi);
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace nare
