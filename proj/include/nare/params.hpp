#pragma once

#include <utility>
#include <vector>

#include "nare/classify.hpp"
#include "nare/doubling.hpp"

namespace nare {

/// Per-row quantities of Q. Rows [0, n) are the D block, [n, n+m) the A block.
struct RowQuantities {
  RVector q, theta, sigma;
  RVector p, s, tau;
  RVector modulus;  // |Q_ii|
  RVector arg;      // arg(Q_ii) in (-pi, pi]
  double varpi = 1.0;
  double omega = 1.0;
  Index n = 0;
  Index m = 0;

  Index size() const { return q.size(); }
  bool in_d_block(Index i) const { return i < n; }
};

/// Throws MarginViolation naming the first row with theta <= q. With strict = false
/// such rows get NaN in p, s and tau instead; the rotation geometry still works.
RowQuantities row_quantities(const QAssembly& qa, bool strict = true);

/// p / varpi through (varpi |Q_ii|^2 - q^2) / (2 varpi (theta - q)).
double p_over_varpi_compact(const RowQuantities& rq, Index i);

/// (psi1, psi2): max of p / varpi over the A-block rows and the D-block rows.
std::pair<double, double> psi_pair(const RowQuantities& rq);

enum class DoublingMode { ADDA, SDA };

ParamChoice immediate_params(const NareProblem& p, DoublingMode mode);

// --- rotation preprocessing -----------------------------------------------

/// Angle of z_perp: cos = omega / sqrt(varpi), sin = (1 - omega) / sqrt(varpi).
double perp_angle(double omega);

/// arg(Q_ii) - perp_angle, reduced to (-pi, pi].
double row_offset(const QAssembly& qa, Index i);

struct FProfile {
  RVector f;
  double max = 0.0;
};

/// f_i(vartheta) = (varpi |Q_ii|^2 - q_i^2) / (varpi (|Q_ii| sqrt(varpi) cos(delta_i - vartheta) - q_i)).
/// Throws Infeasible listing the rows whose denominator is not positive.
FProfile f_profile(const QAssembly& qa, const RowQuantities& rq, double vartheta);

/// Angle where every row is feasible with the largest worst-row margin, from a
/// 3600-point scan. Throws Infeasible when no angle works.
double feasible_angle(const QAssembly& qa, const RowQuantities& rq);

/// Starts from vartheta = 0 when that angle is feasible, else from feasible_angle.
double bisect_vartheta(const QAssembly& qa, const RowQuantities& rq, double tol = 1e-6);

ParamChoice preprocessed_params(const NareProblem& p, DoublingMode mode);

// --- refined strategies ---------------------------------------------------

enum class Block { D, A };

/// Larger root of the quadratic cut by the line gamma = c t.
double r_of_c(double p, double s, double varpi, double c, Block block);
double r_of_c(const RowQuantities& rq, Index i, double c);

/// sqrt(q (theta + sigma^2 / (theta - q))) / varpi
double tau_closed_form(double q, double theta, double sigma, double varpi);

/// (eta1, eta2): max of r over the D-block rows and the A-block rows.
std::pair<double, double> eta_pair(const RowQuantities& rq, double c);

struct CStar {
  double c_star = 1.0;
  double t_star = 0.0;
  double gamma_star = 0.0;
  double lo = 0.0;  // initial bracket
  double hi = 0.0;
};

/// Bisection for eta1(c) = eta2(c). Throws BracketInvalid when no sign change is found.
CStar bisect_c_star(const RowQuantities& rq, double tol = 1e-8);

enum class RefinedMode { SDAn, ADDAn, DAn };

inline constexpr double kDefaultZeta = 1.01;

ParamChoice refined_params(const NareProblem& p, RefinedMode mode, double zeta = kDefaultZeta,
                           bool preprocessed = false);

/// Threshold on t above which |x - c t z| / |x + t z| is nondecreasing.
double monotone_threshold(Complex x, double c, double omega);
bool monotone_region_check(Complex x, double c, double t, double omega);

// --- feasibility ------------------------------------------------------------

/// Per-row slack of the convergence inequalities for the doubling
/// parameters, evaluated on the rotated problem: rhs - lhs, divided by the
/// row scale |Q_ii| + q_i + |alpha| + |beta|. Positive means strictly satisfied.
RVector feasibility_slack(const NareProblem& p, const ParamChoice& pc);

/// min over rows of feasibility_slack.
double min_feasibility_slack(const NareProblem& p, const ParamChoice& pc);

}  // namespace nare
