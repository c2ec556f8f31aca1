#include "nare/classify.hpp"

#include <cmath>
#include <sstream>

#include "nare/error.hpp"
#include "nare/iterative.hpp"

namespace nare {

void NareProblem::validate() const {
  const Index mm = m();
  const Index nn = n();
  auto fail = [](const std::string& what) { throw BadParam("NareProblem: " + what); };
  if (mm <= 0 || nn <= 0) fail("empty coefficient");
  if (A.cols() != mm) fail("A must be square");
  if (D.cols() != nn) fail("D must be square");
  if (B.rows() != mm || B.cols() != nn) fail("B must be m x n");
  if (C.rows() != nn || C.cols() != mm) fail("C must be n x m");
  if (!(omega >= 0.0 && omega <= 1.0)) fail("omega must lie in [0, 1]");
  if (!all_finite(A) || !all_finite(B) || !all_finite(C) || !all_finite(D)) {
    fail("non-finite coefficient entry");
  }
}

NareProblem NareProblem::rotated(Complex chi) const {
  return NareProblem{chi * A, chi * B, chi * C, chi * D, omega};
}

QAssembly assemble_q(const NareProblem& p) {
  QAssembly qa;
  qa.n = p.n();
  qa.m = p.m();
  qa.omega = p.omega;
  qa.varpi = p.omega * p.omega + (1.0 - p.omega) * (1.0 - p.omega);
  const Index N = qa.n + qa.m;
  qa.Q.resize(N, N);
  qa.Q.topLeftCorner(qa.n, qa.n) = p.D;
  qa.Q.topRightCorner(qa.n, qa.m) = -p.C;
  qa.Q.bottomLeftCorner(qa.m, qa.n) = -p.B;
  qa.Q.bottomRightCorner(qa.m, qa.m) = p.A;

  const RMatrix mod = qa.Q.cwiseAbs();
  qa.q = mod.rowwise().sum() - mod.diagonal();
  qa.theta.resize(N);
  qa.sigma.resize(N);
  for (Index i = 0; i < N; ++i) {
    const Complex d = qa.Q(i, i);
    qa.q(i) = std::max(qa.q(i), 0.0);
    qa.theta(i) = omega_proj(d, p.omega);
    qa.sigma(i) = p.omega * d.imag() - (1.0 - p.omega) * d.real();
  }
  return qa;
}

namespace {

RMatrix comparison_with(const CMatrix& m, auto diag) {
  if (m.rows() != m.cols()) throw BadParam("comparison matrix: input is not square");
  RMatrix out = -m.cwiseAbs();
  for (Index i = 0; i < m.rows(); ++i) out(i, i) = diag(m(i, i));
  return out;
}

}  // namespace

RMatrix comparison_first(const CMatrix& m) {
  return comparison_with(m, [](Complex z) { return z.real(); });
}

RMatrix comparison_second(const CMatrix& m) {
  return comparison_with(m, [](Complex z) { return std::abs(z); });
}

RMatrix comparison_omega(const CMatrix& m, double omega) {
  if (omega == 1.0) return comparison_first(m);
  return comparison_with(m, [omega](Complex z) { return omega_proj(z, omega); });
}

namespace {

bool z_pattern(const RMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) > 0.0) return false;
  return true;
}

}  // namespace

bool is_nonsingular_m_matrix(const RMatrix& m) {
  if (m.rows() != m.cols()) return false;
  if (!z_pattern(m)) return false;
  try {
    const RMatrix inv = inverse_checked(m);
    return inv.allFinite() && inv.minCoeff() >= -1e-10;
  } catch (const SingularMatrix&) {
    return false;
  }
}

const char* verdict_name(ClassReport::Verdict v) {
  switch (v) {
    case ClassReport::Verdict::HOmegaStrict: return "HOmegaStrict";
    case ClassReport::Verdict::HOmega: return "HOmega";
    case ClassReport::Verdict::NotHOmega: return "NotHOmega";
  }
  return "?";
}

ClassReport classify(const NareProblem& p) {
  const QAssembly qa = assemble_q(p);
  const RMatrix qw = comparison_omega(qa.Q, p.omega);
  ClassReport r;
  r.is_z_pattern_Qomega = z_pattern(qw);
  r.qomega_is_nonsingular_M = is_nonsingular_m_matrix(qw);
  r.margins = qa.theta - qa.q;
  // Q_omega 1 = theta - q, so positivity of the product is positivity of the margins.
  r.qomega_times_one_positive = r.margins.size() > 0 && r.margins.minCoeff() > 0.0;
  if (r.qomega_is_nonsingular_M && r.qomega_times_one_positive) {
    r.verdict = ClassReport::Verdict::HOmegaStrict;
  } else if (r.qomega_is_nonsingular_M) {
    r.verdict = ClassReport::Verdict::HOmega;
  } else {
    r.verdict = ClassReport::Verdict::NotHOmega;
  }
  return r;
}

bool in_upper_right(Complex lambda, double omega) { return omega_proj(lambda, omega) > 0.0; }

ExtremalReport verify_extremal(const NareProblem& p, const CMatrix& phi) {
  ExtremalReport rep;
  rep.nres = nres(p, phi);
  rep.eigenvalues = eigenvalues(p.D - p.C * phi);
  rep.all_in_upper_right = true;
  for (const Complex& z : rep.eigenvalues) {
    if (!in_upper_right(z, p.omega)) rep.all_in_upper_right = false;
  }
  return rep;
}

}  // namespace nare
