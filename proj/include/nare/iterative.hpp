#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nare/classify.hpp"
#include "nare/cmatrix.hpp"

namespace nare {

enum class SplitKind {
  TFP,
  JFP,
  GSFP1, GSFP2, GSFP3, GSFP4,
  SORFP1, SORFP2, SORFP3, SORFP4,
  AORFP1, AORFP2, AORFP3, AORFP4,
};

const char* split_name(SplitKind k);

struct Splitting {
  SplitKind kind = SplitKind::TFP;
  double sor_omega = 1.0;  // SOR and AOR relaxation
  double aor_gamma = 1.0;  // AOR acceleration
};

/// A = A1 - A2, D = D1 - D2.
struct SplitParts {
  CMatrix A1, A2, D1, D2;
};

/// Triangle pattern per kind, with A = H - L - U (H diagonal, -L strictly
/// lower, -U strictly upper part):
///   GSFP1, SORFP1, AORFP1: A1 keeps U, D1 keeps L
///   GSFP2, SORFP2, AORFP2: A1 keeps U, D1 keeps U
///   GSFP3, SORFP3, AORFP4: A1 keeps L, D1 keeps L
///   GSFP4, SORFP4, AORFP3: A1 keeps L, D1 keeps U
SplitParts split(const NareProblem& p, const Splitting& s);

enum class StopReason { ResidualMet, MaxIter, Diverged, LinAlgFailure };

const char* stop_reason_name(StopReason r);

struct SolveResult {
  CMatrix phi;
  int iterations = 0;
  /// nres_history[k] is the residual of the k-th iterate; entry 0 is the start.
  std::vector<double> nres_history;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIter;
  std::vector<std::string> warnings;
  std::string failure;  // message of the exception behind LinAlgFailure

  double final_nres() const { return nres_history.empty() ? 0.0 : nres_history.back(); }
};

inline constexpr double kDefaultTol = 1e-12;

/// || Phi C Phi - Phi D - A Phi + B ||_1 normalized by
/// ||Phi||_1 (||Phi||_1 ||C||_1 + ||D||_1 + ||A||_1) + ||B||_1.
double nres(const NareProblem& p, const CMatrix& phi);

/// Iterates grow past this multiple of the first nonzero iterate: Diverged.
inline constexpr double kBlowUpFactor = 1e8;

SolveResult newton_solve(const NareProblem& p, int max_iter = 50, double tol = kDefaultTol,
                         SylvesterOptions sylv = {});

SolveResult fixedpoint_solve(const NareProblem& p, const Splitting& s, int max_iter = 10000,
                             double tol = kDefaultTol, SylvesterOptions sylv = {});

/// Sufficient convergence condition for the splitting: the Kronecker sum of
/// the omega-comparison matrices of A1 and D1 is a nonsingular M-matrix.
/// Empty when max(m, n) exceeds the limit.
std::optional<bool> fixedpoint_condition(const NareProblem& p, const SplitParts& parts,
                                         Index limit = 32);

/// Asymptotic linear rate of the fixed-point iteration at the solution phi.
/// Empty when max(m, n) exceeds the limit.
std::optional<double> fixedpoint_rate(const NareProblem& p, const Splitting& s,
                                      const CMatrix& phi, Index limit = 48);

}  // namespace nare
