#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nare/doubling.hpp"
#include "nare/iterative.hpp"
#include "nare/params.hpp"

namespace nare {

enum class Method {
  Newton,
  TFP, JFP,
  GSFP1, GSFP2, GSFP3, GSFP4,
  SORFP1, SORFP2, SORFP3, SORFP4,
  AORFP1, AORFP2, AORFP3, AORFP4,
  SDA, ADDA, SDAn, ADDAn, DAn,
  pSDA, pADDA, pSDAn, pADDAn, pDAn,
};

const char* method_name(Method m);
/// Throws BadParam for unknown names.
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();
bool is_doubling(Method m);

struct MethodOptions {
  double tol = kDefaultTol;
  std::optional<int> max_iter;  // per-family default when empty
  double zeta = kDefaultZeta;
  double sor_omega = 1.0;
  double aor_gamma = 1.0;
  SylvesterOptions sylvester;
};

struct MethodRun {
  SolveResult result;
  std::optional<ParamChoice> params;
  std::optional<CMatrix> psi;
  double seconds = 0.0;
};

/// Parameter choice used by a doubling method. Throws on parameter errors.
ParamChoice choose_params(const NareProblem& p, Method m, double zeta = kDefaultZeta);

/// Runs one method. Parameter-selection failures surface as LinAlgFailure
/// results with the message in result.failure.
MethodRun run_method(const NareProblem& p, Method m, const MethodOptions& opts = {});

}  // namespace nare
