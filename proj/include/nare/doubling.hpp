#pragma once

#include <optional>
#include <string>

#include "nare/classify.hpp"
#include "nare/cmatrix.hpp"
#include "nare/iterative.hpp"

namespace nare {

struct ParamDiagnostics {
  std::optional<double> psi1, psi2;
  std::optional<double> psi1_tilde, psi2_tilde;
  std::optional<double> vartheta;
  std::optional<double> c_star, t_star, gamma_star;
  std::optional<double> tau_star;
};

/// Shift parameters alpha = t z_perp, beta = gamma z_perp, applied to the
/// problem rotated by chi.
struct ParamChoice {
  enum class Strategy { Immediate, Preprocessed, SDAn, ADDAn, DAn, PSDAn, PADDAn, PDAn, Manual };

  Complex alpha{1.0, 0.0};
  Complex beta{1.0, 0.0};
  double t = 1.0;
  double gamma = 1.0;
  Complex chi{1.0, 0.0};
  Strategy strategy = Strategy::Manual;
  ParamDiagnostics diagnostics;
  std::string note;

  /// Fills alpha and beta from t, gamma and omega. Throws BadParam unless t, gamma > 0.
  static ParamChoice make(double t, double gamma, double omega, Complex chi = 1.0,
                          Strategy s = Strategy::Manual);
};

const char* strategy_name(ParamChoice::Strategy s);

struct DoublingState {
  CMatrix E;  // n x n
  CMatrix F;  // m x m
  CMatrix G;  // n x m
  CMatrix H;  // m x n
  int k = 0;
};

/// Initial state for the problem rotated by pc.chi. Throws SingularMatrix.
DoublingState doubling_init(const NareProblem& p, const ParamChoice& pc);

/// One doubling step. Throws SingularMatrix naming k when I - GH or I - HG is singular.
DoublingState doubling_step(const DoublingState& s);

struct DoublingResult {
  SolveResult result;  // phi = H_k; iterations = k
  CMatrix psi;         // G_k, the dual solution
  ParamChoice params;
};

/// Runs the recursion until the residual of H_k on the original problem drops
/// below tol. H_0 counts as iterate 0.
DoublingResult doubling_solve(const NareProblem& p, const ParamChoice& pc, int max_iter = 60,
                              double tol = kDefaultTol);

struct CayleyPair {
  CMatrix R;  // (R - beta I)(R + alpha I)^{-1}, R = D - C Phi
  CMatrix S;  // (S - alpha I)(S + beta I)^{-1}, S = A - B Psi
};

/// Cayley transforms on the rotated problem.
CayleyPair cayley_pair(const NareProblem& p, const ParamChoice& pc, const CMatrix& phi,
                       const CMatrix& psi);

/// rho(R-transform) * rho(S-transform).
double rate_bound(const NareProblem& p, const ParamChoice& pc, const CMatrix& phi,
                  const CMatrix& psi);

}  // namespace nare
