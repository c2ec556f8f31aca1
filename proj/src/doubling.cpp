#include "nare/doubling.hpp"

#include <cmath>
#include <sstream>

#include "nare/error.hpp"

namespace nare {

ParamChoice ParamChoice::make(double t, double gamma, double omega, Complex chi, Strategy s) {
  if (!(t > 0.0) || !(gamma > 0.0) || !std::isfinite(t) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << "shift parameters must be positive and finite (t=" << t << ", gamma=" << gamma << ")";
    throw BadParam(os.str());
  }
  if (std::abs(std::abs(chi) - 1.0) > 1e-14) throw BadParam("rotation chi must be unimodular");
  ParamChoice pc;
  pc.t = t;
  pc.gamma = gamma;
  pc.alpha = t * z_perp(omega);
  pc.beta = gamma * z_perp(omega);
  pc.chi = chi;
  pc.strategy = s;
  return pc;
}

const char* strategy_name(ParamChoice::Strategy s) {
  using S = ParamChoice::Strategy;
  switch (s) {
    case S::Immediate: return "Immediate";
    case S::Preprocessed: return "Preprocessed";
    case S::SDAn: return "SDAn";
    case S::ADDAn: return "ADDAn";
    case S::DAn: return "DAn";
    case S::PSDAn: return "pSDAn";
    case S::PADDAn: return "pADDAn";
    case S::PDAn: return "pDAn";
    case S::Manual: return "Manual";
  }
  return "?";
}

DoublingState doubling_init(const NareProblem& p, const ParamChoice& pc) {
  const NareProblem r = pc.chi == Complex(1.0) ? p : p.rotated(pc.chi);
  const Index m = r.m();
  const Index n = r.n();
  const CMatrix im = CMatrix::Identity(m, m);
  const CMatrix in = CMatrix::Identity(n, n);

  const LuFactor a_beta(r.A + pc.beta * im);
  const LuFactor d_alpha(r.D + pc.alpha * in);
  const CMatrix dinv_c = d_alpha.solve(r.C);  // n x m
  const CMatrix ainv_b = a_beta.solve(r.B);   // m x n
  const CMatrix w = r.A + pc.beta * im - r.B * dinv_c;
  const CMatrix v = r.D + pc.alpha * in - r.C * ainv_b;
  const CMatrix winv = LuFactor(w).solve(im);
  const CMatrix vinv = LuFactor(v).solve(in);
  const Complex s = pc.alpha + pc.beta;

  DoublingState st;
  st.E = in - s * vinv;
  st.F = im - s * winv;
  st.G = s * dinv_c * winv;
  // W^{-1} B D_alpha^{-1} = (D_alpha^{-T} (W^{-1} B)^T)^T
  const CMatrix winv_b = winv * r.B;
  st.H = s * CMatrix(LuFactor(CMatrix((r.D + pc.alpha * in).transpose()))
                         .solve(winv_b.transpose())
                         .transpose());
  st.k = 0;
  return st;
}

DoublingState doubling_step(const DoublingState& s) {
  const Index n = s.E.rows();
  const Index m = s.F.rows();
  DoublingState out;
  try {
    const LuFactor igh(CMatrix(CMatrix::Identity(n, n) - s.G * s.H));
    const LuFactor ihg(CMatrix(CMatrix::Identity(m, m) - s.H * s.G));
    out.E = s.E * igh.solve(s.E);
    out.F = s.F * ihg.solve(s.F);
    out.G = s.G + s.E * igh.solve(CMatrix(s.G * s.F));
    out.H = s.H + s.F * ihg.solve(CMatrix(s.H * s.E));
  } catch (const SingularMatrix& e) {
    std::ostringstream os;
    os << "doubling step k=" << s.k << ": " << e.what();
    throw SingularMatrix(os.str());
  }
  out.k = s.k + 1;
  return out;
}

DoublingResult doubling_solve(const NareProblem& p, const ParamChoice& pc, int max_iter,
                              double tol) {
  p.validate();
  const SubnormalFlush flush;
  DoublingResult out;
  out.params = pc;
  SolveResult& r = out.result;
  if (classify(p).verdict != ClassReport::Verdict::HOmegaStrict) {
    r.warnings.push_back("problem is not in the strict class; convergence is not guaranteed");
  }

  DoublingState st;
  try {
    st = doubling_init(p, pc);
  } catch (const Error& e) {
    r.phi = CMatrix::Zero(p.m(), p.n());
    r.stop_reason = StopReason::LinAlgFailure;
    r.failure = std::string("doubling init: ") + e.what();
    return out;
  }

  double ref_norm = std::max(one_norm(st.H), 1.0);
  auto accept = [&](const DoublingState& s) {
    r.phi = s.H;
    out.psi = s.G;
    r.iterations = s.k;
    const double nh = one_norm(s.H);
    if (!all_finite(s.H) || nh > kBlowUpFactor * ref_norm) {
      r.nres_history.push_back(NAN);
      r.stop_reason = StopReason::Diverged;
      return true;
    }
    const double res = nres(p, s.H);
    r.nres_history.push_back(res);
    if (!std::isfinite(res)) {
      r.stop_reason = StopReason::Diverged;
      return true;
    }
    if (res < tol) {
      r.converged = true;
      r.stop_reason = StopReason::ResidualMet;
      return true;
    }
    return false;
  };

  if (accept(st)) return out;
  for (int k = 1; k <= max_iter; ++k) {
    try {
      st = doubling_step(st);
    } catch (const Error& e) {
      r.stop_reason = StopReason::LinAlgFailure;
      r.failure = e.what();
      return out;
    }
    if (accept(st)) return out;
  }
  r.stop_reason = StopReason::MaxIter;
  return out;
}

CayleyPair cayley_pair(const NareProblem& p, const ParamChoice& pc, const CMatrix& phi,
                       const CMatrix& psi) {
  const NareProblem r = pc.chi == Complex(1.0) ? p : p.rotated(pc.chi);
  const Index m = r.m();
  const Index n = r.n();
  const CMatrix in = CMatrix::Identity(n, n);
  const CMatrix im = CMatrix::Identity(m, m);
  const CMatrix rr = r.D - r.C * phi;
  const CMatrix ss = r.A - r.B * psi;
  // X Y^{-1} = (Y^{-T} X^T)^T
  auto right_div = [](const CMatrix& x, const CMatrix& y) {
    return CMatrix(LuFactor(CMatrix(y.transpose())).solve(x.transpose()).transpose());
  };
  CayleyPair cp;
  cp.R = right_div(rr - pc.beta * in, rr + pc.alpha * in);
  cp.S = right_div(ss - pc.alpha * im, ss + pc.beta * im);
  return cp;
}

double rate_bound(const NareProblem& p, const ParamChoice& pc, const CMatrix& phi,
                  const CMatrix& psi) {
  const CayleyPair cp = cayley_pair(p, pc, phi, psi);
  return spectral_radius(cp.R) * spectral_radius(cp.S);
}

}  // namespace nare
