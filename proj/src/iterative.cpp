#include "nare/iterative.hpp"

#include <cmath>
#include <sstream>

#include "nare/error.hpp"

namespace nare {

const char* split_name(SplitKind k) {
  switch (k) {
    case SplitKind::TFP: return "TFP";
    case SplitKind::JFP: return "JFP";
    case SplitKind::GSFP1: return "GSFP1";
    case SplitKind::GSFP2: return "GSFP2";
    case SplitKind::GSFP3: return "GSFP3";
    case SplitKind::GSFP4: return "GSFP4";
    case SplitKind::SORFP1: return "SORFP1";
    case SplitKind::SORFP2: return "SORFP2";
    case SplitKind::SORFP3: return "SORFP3";
    case SplitKind::SORFP4: return "SORFP4";
    case SplitKind::AORFP1: return "AORFP1";
    case SplitKind::AORFP2: return "AORFP2";
    case SplitKind::AORFP3: return "AORFP3";
    case SplitKind::AORFP4: return "AORFP4";
  }
  return "?";
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ResidualMet: return "ResidualMet";
    case StopReason::MaxIter: return "MaxIter";
    case StopReason::Diverged: return "Diverged";
    case StopReason::LinAlgFailure: return "LinAlgFailure";
  }
  return "?";
}

namespace {

// M = H - L - U.
struct Hlu {
  CMatrix H, L, U;
};

Hlu hlu(const CMatrix& m) {
  Hlu r;
  r.H = m.diagonal().asDiagonal();
  r.L = -CMatrix(m.triangularView<Eigen::StrictlyLower>());
  r.U = -CMatrix(m.triangularView<Eigen::StrictlyUpper>());
  return r;
}

enum class Keep { Upper, Lower };

// keep = Upper: M1 = H - U, M2 = L.
void gs_side(const Hlu& d, Keep keep, CMatrix& m1, CMatrix& m2) {
  const CMatrix& kept = keep == Keep::Upper ? d.U : d.L;
  const CMatrix& other = keep == Keep::Upper ? d.L : d.U;
  m1 = d.H - kept;
  m2 = other;
}

void sor_side(const Hlu& d, Keep keep, double w, CMatrix& m1, CMatrix& m2) {
  const CMatrix& kept = keep == Keep::Upper ? d.U : d.L;
  const CMatrix& other = keep == Keep::Upper ? d.L : d.U;
  m1 = d.H / w - kept;
  m2 = (1.0 / w - 1.0) * d.H + other;
}

void aor_side(const Hlu& d, Keep keep, double w, double g, CMatrix& m1, CMatrix& m2) {
  const CMatrix& kept = keep == Keep::Upper ? d.U : d.L;
  const CMatrix& other = keep == Keep::Upper ? d.L : d.U;
  m1 = (d.H - g * kept) / w;
  m2 = ((1.0 - w) * d.H + (w - g) * kept + w * other) / w;
}

}  // namespace

SplitParts split(const NareProblem& p, const Splitting& s) {
  SplitParts out;
  const Hlu a = hlu(p.A);
  const Hlu d = hlu(p.D);
  const double w = s.sor_omega;
  const double g = s.aor_gamma;

  auto needs = [&](bool omega_used, bool gamma_used) {
    if (omega_used && !(w > 0.0)) throw BadParam("split: relaxation parameter must be positive");
    if (gamma_used && !(g > 0.0)) throw BadParam("split: AOR gamma must be positive");
  };

  switch (s.kind) {
    case SplitKind::TFP:
      out.A1 = p.A;
      out.A2 = CMatrix::Zero(p.m(), p.m());
      out.D1 = p.D;
      out.D2 = CMatrix::Zero(p.n(), p.n());
      break;
    case SplitKind::JFP:
      out.A1 = a.H;
      out.A2 = a.L + a.U;
      out.D1 = d.H;
      out.D2 = d.L + d.U;
      break;
    case SplitKind::GSFP1:
      gs_side(a, Keep::Upper, out.A1, out.A2);
      gs_side(d, Keep::Lower, out.D1, out.D2);
      break;
    case SplitKind::GSFP2:
      gs_side(a, Keep::Upper, out.A1, out.A2);
      gs_side(d, Keep::Upper, out.D1, out.D2);
      break;
    case SplitKind::GSFP3:
      gs_side(a, Keep::Lower, out.A1, out.A2);
      gs_side(d, Keep::Lower, out.D1, out.D2);
      break;
    case SplitKind::GSFP4:
      gs_side(a, Keep::Lower, out.A1, out.A2);
      gs_side(d, Keep::Upper, out.D1, out.D2);
      break;
    case SplitKind::SORFP1:
    case SplitKind::SORFP2:
    case SplitKind::SORFP3:
    case SplitKind::SORFP4: {
      needs(true, false);
      const bool a_up = s.kind == SplitKind::SORFP1 || s.kind == SplitKind::SORFP2;
      const bool d_up = s.kind == SplitKind::SORFP2 || s.kind == SplitKind::SORFP4;
      sor_side(a, a_up ? Keep::Upper : Keep::Lower, w, out.A1, out.A2);
      sor_side(d, d_up ? Keep::Upper : Keep::Lower, w, out.D1, out.D2);
      break;
    }
    case SplitKind::AORFP1:
    case SplitKind::AORFP2:
    case SplitKind::AORFP3:
    case SplitKind::AORFP4: {
      needs(true, false);
      if (g < 0.0) throw BadParam("split: AOR gamma must be nonnegative");
      const bool a_up = s.kind == SplitKind::AORFP1 || s.kind == SplitKind::AORFP2;
      const bool d_up = s.kind == SplitKind::AORFP2 || s.kind == SplitKind::AORFP3;
      aor_side(a, a_up ? Keep::Upper : Keep::Lower, w, g, out.A1, out.A2);
      aor_side(d, d_up ? Keep::Upper : Keep::Lower, w, g, out.D1, out.D2);
      break;
    }
  }
  return out;
}

double nres(const NareProblem& p, const CMatrix& phi) {
  const double nb = one_norm(p.B);
  if (nb == 0.0 && one_norm(phi) == 0.0) return 0.0;
  const CMatrix res = phi * p.C * phi - phi * p.D - p.A * phi + p.B;
  const double np = one_norm(phi);
  const double den = np * (np * one_norm(p.C) + one_norm(p.D) + one_norm(p.A)) + nb;
  if (den == 0.0) return 0.0;
  return one_norm(res) / den;
}

namespace {

void warn_if_not_strict(const NareProblem& p, SolveResult& r) {
  const ClassReport rep = classify(p);
  if (rep.verdict != ClassReport::Verdict::HOmegaStrict) {
    r.warnings.push_back(std::string("problem classifies as ") + verdict_name(rep.verdict) +
                         "; convergence is not guaranteed");
  }
}

// Shared loop: step(phi) returns the next iterate.
template <typename Step>
SolveResult iterate(const NareProblem& p, int max_iter, double tol, SolveResult r, Step step) {
  const SubnormalFlush flush;
  r.phi = CMatrix::Zero(p.m(), p.n());
  r.nres_history.push_back(nres(p, r.phi));
  if (r.nres_history.back() < tol) {
    r.converged = true;
    r.stop_reason = StopReason::ResidualMet;
    return r;
  }
  double ref_norm = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    CMatrix next;
    try {
      next = step(r.phi);
    } catch (const Error& e) {
      r.stop_reason = StopReason::LinAlgFailure;
      r.failure = e.what();
      return r;
    }
    r.iterations = k;
    const double nphi = one_norm(next);
    if (ref_norm == 0.0) ref_norm = nphi;
    if (!all_finite(next) || nphi > kBlowUpFactor * std::max(ref_norm, 1.0)) {
      r.stop_reason = StopReason::Diverged;
      r.phi = std::move(next);
      r.nres_history.push_back(std::isfinite(nphi) ? nres(p, r.phi) : NAN);
      return r;
    }
    r.phi = std::move(next);
    const double res = nres(p, r.phi);
    r.nres_history.push_back(res);
    if (!std::isfinite(res)) {
      r.stop_reason = StopReason::Diverged;
      return r;
    }
    if (res < tol) {
      r.converged = true;
      r.stop_reason = StopReason::ResidualMet;
      return r;
    }
  }
  r.stop_reason = StopReason::MaxIter;
  return r;
}

}  // namespace

SolveResult newton_solve(const NareProblem& p, int max_iter, double tol, SylvesterOptions sylv) {
  p.validate();
  SolveResult r;
  warn_if_not_strict(p, r);
  return iterate(p, max_iter, tol, std::move(r), [&](const CMatrix& phi) {
    const CMatrix phic = phi * p.C;
    return solve_sylvester(p.A - phic, p.D - p.C * phi, p.B - phic * phi, sylv);
  });
}

SolveResult fixedpoint_solve(const NareProblem& p, const Splitting& s, int max_iter, double tol,
                             SylvesterOptions sylv) {
  p.validate();
  SolveResult r;
  warn_if_not_strict(p, r);
  const SplitParts parts = split(p, s);
  const auto cond = fixedpoint_condition(p, parts, sylv.kronecker_threshold);
  if (!cond) {
    r.warnings.push_back("sufficient convergence condition not checked at this size");
  } else if (!*cond) {
    r.warnings.push_back("sufficient convergence condition fails for this splitting");
  }

  std::unique_ptr<SylvesterSolver> solver;
  try {
    solver = std::make_unique<SylvesterSolver>(parts.A1, parts.D1, sylv);
  } catch (const Error& e) {
    r.phi = CMatrix::Zero(p.m(), p.n());
    r.nres_history.push_back(nres(p, r.phi));
    r.stop_reason = StopReason::LinAlgFailure;
    r.failure = e.what();
    return r;
  }
  const bool has_a2 = !parts.A2.isZero(0.0);
  const bool has_d2 = !parts.D2.isZero(0.0);
  return iterate(p, max_iter, tol, std::move(r), [&](const CMatrix& phi) {
    CMatrix rhs = p.B + phi * p.C * phi;
    if (has_a2) rhs.noalias() += parts.A2 * phi;
    if (has_d2) rhs.noalias() += phi * parts.D2;
    return solver->solve(rhs);
  });
}

namespace {

RMatrix kron_real(const RMatrix& a, const RMatrix& b) {
  RMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

std::optional<bool> fixedpoint_condition(const NareProblem& p, const SplitParts& parts,
                                         Index limit) {
  if (std::max(p.m(), p.n()) > limit) return std::nullopt;
  const RMatrix a1 = comparison_omega(parts.A1, p.omega);
  const RMatrix d1 = comparison_omega(parts.D1, p.omega);
  const RMatrix op = kron_real(RMatrix::Identity(p.n(), p.n()), a1) +
                     kron_real(d1.transpose(), RMatrix::Identity(p.m(), p.m()));
  return is_nonsingular_m_matrix(op);
}

std::optional<double> fixedpoint_rate(const NareProblem& p, const Splitting& s,
                                      const CMatrix& phi, Index limit) {
  if (std::max(p.m(), p.n()) > limit) return std::nullopt;
  const SplitParts parts = split(p, s);
  const CMatrix im = CMatrix::Identity(p.m(), p.m());
  const CMatrix in = CMatrix::Identity(p.n(), p.n());
  const CMatrix lhs = kron(in, parts.A1) + kron(parts.D1.transpose(), im);
  const CMatrix rhs =
      kron(in, CMatrix(parts.A2 + phi * p.C)) + kron(CMatrix(parts.D2 + p.C * phi).transpose(), im);
  return spectral_radius(solve_linear(lhs, rhs));
}

}  // namespace nare
