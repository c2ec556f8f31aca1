#include "nare/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nare/error.hpp"

namespace nare {

namespace {

constexpr double kPi = std::numbers::pi;

double block_max(const RVector& v, Index begin, Index end) {
  double out = -std::numeric_limits<double>::infinity();
  for (Index i = begin; i < end; ++i) out = std::max(out, v(i));
  return out;
}

}  // namespace

RowQuantities row_quantities(const QAssembly& qa, bool strict) {
  const Index N = qa.Q.rows();
  RowQuantities rq;
  rq.q = qa.q;
  rq.theta = qa.theta;
  rq.sigma = qa.sigma;
  rq.varpi = qa.varpi;
  rq.omega = qa.omega;
  rq.n = qa.n;
  rq.m = qa.m;
  rq.p.resize(N);
  rq.s.resize(N);
  rq.tau.resize(N);
  rq.modulus.resize(N);
  rq.arg.resize(N);
  for (Index i = 0; i < N; ++i) {
    const double margin = qa.theta(i) - qa.q(i);
    rq.modulus(i) = std::abs(qa.Q(i, i));
    rq.arg(i) = std::arg(qa.Q(i, i));
    if (!(margin > 0.0) && !strict) {
      rq.p(i) = rq.s(i) = rq.tau(i) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (!(margin > 0.0)) {
      std::ostringstream os;
      os << "row " << i << ": omega-projected diagonal " << qa.theta(i)
         << " does not exceed off-diagonal row sum " << qa.q(i);
      throw MarginViolation(os.str(), static_cast<long>(i));
    }
    const double tail = qa.sigma(i) * qa.sigma(i) / (2.0 * margin);
    rq.p(i) = (qa.theta(i) + qa.q(i)) / 2.0 + tail;
    rq.s(i) = margin / 2.0 + tail;
    rq.tau(i) = tau_closed_form(qa.q(i), qa.theta(i), qa.sigma(i), qa.varpi);
  }
  return rq;
}

double p_over_varpi_compact(const RowQuantities& rq, Index i) {
  const double w = rq.varpi;
  const double num = w * rq.modulus(i) * rq.modulus(i) - rq.q(i) * rq.q(i);
  return num / (2.0 * w * (rq.theta(i) - rq.q(i)));
}

std::pair<double, double> psi_pair(const RowQuantities& rq) {
  const Index N = rq.size();
  return {block_max(rq.p, rq.n, N) / rq.varpi, block_max(rq.p, 0, rq.n) / rq.varpi};
}

ParamChoice immediate_params(const NareProblem& p, DoublingMode mode) {
  const RowQuantities rq = row_quantities(assemble_q(p));
  const auto [psi1, psi2] = psi_pair(rq);
  const double top = std::max(psi1, psi2);
  ParamChoice pc = mode == DoublingMode::ADDA
                       ? ParamChoice::make(psi1, psi2, p.omega)
                       : ParamChoice::make(top, top, p.omega);
  pc.strategy = ParamChoice::Strategy::Immediate;
  pc.diagnostics.psi1 = psi1;
  pc.diagnostics.psi2 = psi2;
  return pc;
}

double perp_angle(double omega) { return std::atan2(1.0 - omega, omega); }

double row_offset(const QAssembly& qa, Index i) {
  // arg(Q_ii e^{-j phi}) keeps the result in (-pi, pi] without a separate wrap.
  return std::arg(qa.Q(i, i) * std::polar(1.0, -perp_angle(qa.omega)));
}

FProfile f_profile(const QAssembly& qa, const RowQuantities& rq, double vartheta) {
  const Index N = rq.size();
  const double w = rq.varpi;
  const double sw = std::sqrt(w);
  FProfile out;
  out.f.resize(N);
  out.max = 0.0;
  std::vector<Index> bad;
  for (Index i = 0; i < N; ++i) {
    const double den =
        w * (rq.modulus(i) * sw * std::cos(row_offset(qa, i) - vartheta) - rq.q(i));
    const double num = w * rq.modulus(i) * rq.modulus(i) - rq.q(i) * rq.q(i);
    if (!(den > 0.0)) {
      bad.push_back(i);
      out.f(i) = std::numeric_limits<double>::infinity();
      continue;
    }
    out.f(i) = num / den;
    out.max = std::max(out.max, out.f(i));
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "rotation angle " << vartheta << " is infeasible for rows";
    for (Index i : bad) os << ' ' << i;
    throw Infeasible(os.str());
  }
  return out;
}

double feasible_angle(const QAssembly& qa, const RowQuantities& rq) {
  const Index N = rq.size();
  const double sw = std::sqrt(rq.varpi);
  std::vector<double> delta(static_cast<size_t>(N));
  for (Index i = 0; i < N; ++i) delta[static_cast<size_t>(i)] = row_offset(qa, i);
  constexpr int kGrid = 3600;
  double best = -std::numeric_limits<double>::infinity(), best_angle = 0.0;
  for (int k = 0; k < kGrid; ++k) {
    const double a = -kPi + 2.0 * kPi * k / kGrid;
    double worst = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < N; ++i)
      worst = std::min(worst, rq.modulus(i) * sw * std::cos(delta[static_cast<size_t>(i)] - a) - rq.q(i));
    if (worst > best) {
      best = worst;
      best_angle = a;
    }
  }
  if (!(best > 0.0)) throw Infeasible("no rotation angle makes every row feasible");
  return best_angle;
}

double bisect_vartheta(const QAssembly& qa, const RowQuantities& rq, double tol) {
  const Index N = rq.size();
  const double w = rq.varpi;
  const double sw = std::sqrt(w);

  double start = 0.0;
  double d = 0.0;
  try {
    d = f_profile(qa, rq, 0.0).max;
  } catch (const Infeasible&) {
    start = feasible_angle(qa, rq);
    d = f_profile(qa, rq, start).max;
  }
  // Offsets unwrapped around the start angle, where every row is feasible.
  std::vector<double> delta(static_cast<size_t>(N));
  for (Index i = 0; i < N; ++i)
    delta[static_cast<size_t>(i)] = start + std::remainder(row_offset(qa, i) - start, 2.0 * kPi);

  double lo = *std::min_element(delta.begin(), delta.end());
  double hi = *std::max_element(delta.begin(), delta.end());
  for (Index i = 0; i < N; ++i) {
    const double mod = rq.modulus(i);
    const double qi = rq.q(i);
    double c = (qi + (w * mod * mod - qi * qi) / (d * w)) / (mod * sw);
    if (c > 1.0 + 1e-9) {
      std::ostringstream os;
      os << "row " << i << ": level set of f at the start angle is empty (cos " << c << ")";
      throw Infeasible(os.str());
    }
    c = std::clamp(c, -1.0, 1.0);
    const double half = std::acos(c);
    lo = std::max(lo, delta[static_cast<size_t>(i)] - half);
    hi = std::min(hi, delta[static_cast<size_t>(i)] + half);
  }
  if (hi <= lo) return 0.5 * (lo + hi);

  // a: rows whose minimizer lies to the right, b: to the left, c: at the point.
  constexpr double kTie = 1e-12;
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    const FProfile fp = f_profile(qa, rq, mid);
    double a = 0.0, b = 0.0, c = 0.0;
    for (Index i = 0; i < N; ++i) {
      const double off = delta[static_cast<size_t>(i)] - mid;
      double& slot = off > kTie ? a : (off < -kTie ? b : c);
      slot = std::max(slot, fp.f(i));
    }
    if (c >= std::max(a, b) || a == b) return mid;
    if (a > b) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ParamChoice preprocessed_params(const NareProblem& p, DoublingMode mode) {
  const QAssembly qa = assemble_q(p);
  // The original problem may sit outside the class while a rotation of it does not.
  const RowQuantities rq = row_quantities(qa, false);
  const auto [psi1, psi2] = psi_pair(rq);
  const double vt = bisect_vartheta(qa, rq);
  const Complex chi = std::polar(1.0, -vt);

  RowQuantities rot;
  try {
    rot = row_quantities(assemble_q(p.rotated(chi)));
  } catch (const MarginViolation& e) {
    throw RotationInfeasible(std::string("rotated problem leaves the class: ") + e.what());
  }
  const auto [tp1, tp2] = psi_pair(rot);
  const double top = std::max(tp1, tp2);
  ParamChoice pc = mode == DoublingMode::ADDA ? ParamChoice::make(tp1, tp2, p.omega, chi)
                                              : ParamChoice::make(top, top, p.omega, chi);
  pc.strategy = ParamChoice::Strategy::Preprocessed;
  if (rq.p.allFinite()) {
    pc.diagnostics.psi1 = psi1;
    pc.diagnostics.psi2 = psi2;
  }
  pc.diagnostics.psi1_tilde = tp1;
  pc.diagnostics.psi2_tilde = tp2;
  pc.diagnostics.vartheta = vt;
  return pc;
}

double tau_closed_form(double q, double theta, double sigma, double varpi) {
  return std::sqrt(q * (theta + sigma * sigma / (theta - q))) / varpi;
}

double r_of_c(double p, double s, double varpi, double c, Block block) {
  if (!(c > 0.0)) throw BadParam("r_of_c: slope must be positive");
  const double lin = (c - 1.0) * p;        // enters with sign -1 (D) or +1 (A)
  const double prod = (p - s) * (p + s);   // p^2 - s^2 = q (p + s) >= 0
  const double root = std::sqrt(lin * lin + 4.0 * c * std::max(prod, 0.0));
  const double b = block == Block::D ? -lin : lin;
  // Rationalize when -b + root would cancel.
  if (b < 0.0) return 2.0 * std::max(prod, 0.0) / (varpi * (root - b));
  return (b + root) / (2.0 * c * varpi);
}

double r_of_c(const RowQuantities& rq, Index i, double c) {
  return r_of_c(rq.p(i), rq.s(i), rq.varpi, c, rq.in_d_block(i) ? Block::D : Block::A);
}

std::pair<double, double> eta_pair(const RowQuantities& rq, double c) {
  double e1 = 0.0, e2 = 0.0;
  for (Index i = 0; i < rq.size(); ++i) {
    const double r = r_of_c(rq, i, c);
    if (rq.in_d_block(i)) {
      e1 = std::max(e1, r);
    } else {
      e2 = std::max(e2, r);
    }
  }
  return {e1, e2};
}

CStar bisect_c_star(const RowQuantities& rq, double tol) {
  const Index N = rq.size();
  const double w = rq.varpi;
  double t_low = 0.0, g_low = 0.0;
  for (Index i = 0; i < N; ++i) {
    const double v = (rq.p(i) - rq.s(i)) * (rq.p(i) + rq.s(i)) / (w * rq.p(i));
    double& slot = rq.in_d_block(i) ? g_low : t_low;
    slot = std::max(slot, v);
  }
  const auto [psi1, psi2] = psi_pair(rq);

  auto g = [&](double c) {
    const auto [e1, e2] = eta_pair(rq, c);
    return e1 - e2;
  };

  CStar out;
  double lo = g_low / psi1;
  double hi = t_low > 0.0 ? psi2 / t_low : std::numeric_limits<double>::infinity();
  out.lo = lo;
  out.hi = hi;
  // The closed-form bracket degenerates when a block has q = 0 throughout; widen geometrically.
  if (!(lo > 0.0) || !std::isfinite(lo) || g(lo) < 0.0) {
    lo = (std::isfinite(hi) && hi > 0.0) ? hi : 1.0;
    for (int k = 0; k < 400 && g(lo) < 0.0; ++k) lo *= 0.5;
  }
  if (!std::isfinite(hi) || !(hi > lo) || g(hi) > 0.0) {
    hi = std::max(lo, 1.0);
    for (int k = 0; k < 400 && g(hi) > 0.0; ++k) hi *= 2.0;
  }
  const double glo = g(lo);
  const double ghi = g(hi);
  if (!(glo >= 0.0) || !(ghi <= 0.0)) {
    std::ostringstream os;
    os << "eta1 - eta2 has no sign change on [" << lo << ", " << hi << "] (values " << glo
       << ", " << ghi << ")";
    throw BracketInvalid(os.str());
  }

  double c = glo == 0.0 ? lo : (ghi == 0.0 ? hi : 0.5 * (lo + hi));
  if (glo != 0.0 && ghi != 0.0) {
    while (hi - lo > tol * hi) {
      c = 0.5 * (lo + hi);
      const double gc = g(c);
      if (gc == 0.0) break;
      (gc > 0.0 ? lo : hi) = c;
    }
    c = 0.5 * (lo + hi);
  }
  out.c_star = c;
  out.t_star = eta_pair(rq, c).second;
  out.gamma_star = c * out.t_star;
  return out;
}

namespace {

ParamChoice sdan(const RowQuantities& rq, double omega, double zeta, ParamDiagnostics& diag) {
  const auto [psi1, psi2] = psi_pair(rq);
  const double top = std::max(psi1, psi2);
  double gersh = 0.0;
  for (Index i = 0; i < rq.size(); ++i) gersh = std::max(gersh, rq.modulus(i) + rq.q(i));
  gersh /= std::sqrt(rq.varpi);
  const double tau_star = zeta * rq.tau.maxCoeff();
  diag.tau_star = tau_star;
  const double t = gersh >= top ? top : std::max(tau_star, 0.5 * gersh);
  return ParamChoice::make(t, t, omega);
}

ParamChoice addan(const RowQuantities& rq, double omega, double zeta, ParamDiagnostics& diag) {
  const CStar cs = bisect_c_star(rq);
  diag.c_star = cs.c_star;
  diag.t_star = cs.t_star;
  diag.gamma_star = cs.gamma_star;
  // gamma keeps the slope c* so that both blocks stay strictly inside the region.
  const double t = zeta * cs.t_star;
  return ParamChoice::make(t, cs.c_star * t, omega);
}

}  // namespace

ParamChoice refined_params(const NareProblem& p, RefinedMode mode, double zeta,
                           bool preprocessed) {
  if (!(zeta > 1.0)) throw BadParam("zeta must exceed 1");
  const QAssembly qa0 = assemble_q(p);
  const RowQuantities rq0 = row_quantities(qa0, !preprocessed);
  const auto [psi1, psi2] = psi_pair(rq0);

  ParamDiagnostics diag;
  if (rq0.p.allFinite()) {
    diag.psi1 = psi1;
    diag.psi2 = psi2;
  }
  Complex chi = 1.0;
  RowQuantities rq = rq0;
  if (preprocessed) {
    const double vt = bisect_vartheta(qa0, rq0);
    chi = std::polar(1.0, -vt);
    diag.vartheta = vt;
    try {
      rq = row_quantities(assemble_q(p.rotated(chi)));
    } catch (const MarginViolation& e) {
      throw RotationInfeasible(std::string("rotated problem leaves the class: ") + e.what());
    }
    const auto [a, b] = psi_pair(rq);
    diag.psi1_tilde = a;
    diag.psi2_tilde = b;
  }
  const auto [w1, w2] = psi_pair(rq);

  using S = ParamChoice::Strategy;
  ParamChoice pc;
  std::string note;
  if (rq.q.maxCoeff() == 0.0) {
    // Fully decoupled rows: every positive pair is admissible.
    pc = ParamChoice::make(1.0, 1.0, p.omega);
    note = "all off-diagonal row sums vanish; t = gamma = 1";
  } else {
    RefinedMode pick = mode;
    if (mode == RefinedMode::DAn) {
      const double ratio = w1 / w2;
      pick = (ratio > 0.1 && ratio < 10.0) ? RefinedMode::SDAn : RefinedMode::ADDAn;
      note = pick == RefinedMode::SDAn ? "dispatched to SDAn" : "dispatched to ADDAn";
    }
    pc = pick == RefinedMode::SDAn ? sdan(rq, p.omega, zeta, diag) : addan(rq, p.omega, zeta, diag);
  }
  pc.chi = chi;
  pc.diagnostics = diag;
  pc.note = note;
  switch (mode) {
    case RefinedMode::SDAn: pc.strategy = preprocessed ? S::PSDAn : S::SDAn; break;
    case RefinedMode::ADDAn: pc.strategy = preprocessed ? S::PADDAn : S::ADDAn; break;
    case RefinedMode::DAn: pc.strategy = preprocessed ? S::PDAn : S::DAn; break;
  }
  return pc;
}

double monotone_threshold(Complex x, double c, double omega) {
  const double w = omega * omega + (1.0 - omega) * (1.0 - omega);
  const double th = omega_proj(x, omega);
  if (!(th > 0.0)) throw BadParam("monotone_threshold: x is not in the upper right half plane");
  if (!(c > 0.0)) throw BadParam("monotone_threshold: slope must be positive");
  const double x2 = std::norm(x);
  const double lin = (c - 1.0) * w * x2;
  return (-lin + std::sqrt(lin * lin + 4.0 * c * w * th * th * x2)) / (2.0 * c * w * th);
}

bool monotone_region_check(Complex x, double c, double t, double omega) {
  return t >= monotone_threshold(x, c, omega);
}

RVector feasibility_slack(const NareProblem& p, const ParamChoice& pc) {
  const NareProblem r = pc.chi == Complex(1.0) ? p : p.rotated(pc.chi);
  const QAssembly qa = assemble_q(r);
  const double w = p.omega;
  const Index N = qa.Q.rows();
  RVector out(N);
  for (Index i = 0; i < N; ++i) {
    const Complex d = qa.Q(i, i);
    const bool dblock = i < qa.n;
    const Complex near = dblock ? pc.alpha : pc.beta;  // paired with +Q_ii
    const Complex far = dblock ? pc.beta : pc.alpha;   // paired with -Q_ii
    const double lhs =
        (omega_proj(near, w) + qa.q(i)) / std::abs(near + d) * std::abs(far - d);
    const double rhs = omega_proj(far, w) - qa.q(i);
    const double scale = std::abs(d) + qa.q(i) + std::abs(pc.alpha) + std::abs(pc.beta);
    out(i) = (rhs - lhs) / scale;
  }
  return out;
}

double min_feasibility_slack(const NareProblem& p, const ParamChoice& pc) {
  return feasibility_slack(p, pc).minCoeff();
}

}  // namespace nare
