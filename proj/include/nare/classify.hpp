#pragma once

#include <vector>

#include "nare/cmatrix.hpp"

namespace nare {

/// X C X - X D - A X + B = 0 with X of size m x n.
struct NareProblem {
  CMatrix A;  // m x m
  CMatrix B;  // m x n
  CMatrix C;  // n x m
  CMatrix D;  // n x n
  double omega = 1.0;

  Index m() const { return A.rows(); }
  Index n() const { return D.rows(); }

  /// Throws BadParam on inconsistent shapes, non-finite data or omega outside [0, 1].
  void validate() const;

  /// chi * (A, B, C, D). Same solution set for any nonzero chi.
  NareProblem rotated(Complex chi) const;
};

struct QAssembly {
  CMatrix Q;  // [[D, -C], [-B, A]]
  RVector q;  // off-diagonal absolute row sums of Q
  RVector theta;
  RVector sigma;
  double varpi = 1.0;
  double omega = 1.0;
  Index n = 0;  // rows [0, n) belong to the D block
  Index m = 0;  // rows [n, n+m) belong to the A block
};

QAssembly assemble_q(const NareProblem& p);

/// omega * Re(z) + (1 - omega) * Im(z)
inline double omega_proj(Complex z, double omega) {
  return omega * z.real() + (1.0 - omega) * z.imag();
}

/// omega + j(1 - omega), the normal of the line L(z_omega, 0).
inline Complex z_perp(double omega) { return {omega, 1.0 - omega}; }

RMatrix comparison_first(const CMatrix& m);
RMatrix comparison_second(const CMatrix& m);
RMatrix comparison_omega(const CMatrix& m, double omega);

/// Z-pattern, numerically nonsingular and inverse entrywise >= -1e-10.
bool is_nonsingular_m_matrix(const RMatrix& m);

struct ClassReport {
  enum class Verdict { HOmegaStrict, HOmega, NotHOmega };

  bool is_z_pattern_Qomega = false;
  bool qomega_is_nonsingular_M = false;
  bool qomega_times_one_positive = false;
  RVector margins;
  Verdict verdict = Verdict::NotHOmega;
};

const char* verdict_name(ClassReport::Verdict v);

ClassReport classify(const NareProblem& p);

/// Strictly on the upper right of L(z_omega, 0).
bool in_upper_right(Complex lambda, double omega);

struct ExtremalReport {
  double nres = 0.0;
  std::vector<Complex> eigenvalues;  // of D - C Phi
  bool all_in_upper_right = false;
};

ExtremalReport verify_extremal(const NareProblem& p, const CMatrix& phi);

}  // namespace nare
