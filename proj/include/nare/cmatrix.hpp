#pragma once

// Dense complex linear algebra used throughout the solvers: norms, Kronecker
// products, LU solves, Sylvester solves and small-scale eigenvalues.

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <vector>

namespace nare {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Pivots below this multiple of the one-norm count as zero.
inline constexpr double kPivotTolerance = 1e-14;

RMatrix abs_entrywise(const CMatrix& m);

/// Maximum column sum of entry moduli.
double one_norm(const CMatrix& m);
double one_norm(const RMatrix& m);

CMatrix kron(const CMatrix& p, const CMatrix& q);

/// Column-stacking vectorization and its inverse.
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Index rows, Index cols);

bool all_finite(const CMatrix& m);

/// Partial-pivoting LU of a square complex matrix. Construction throws
/// SingularMatrix when a pivot modulus is below kPivotTolerance * ||M||_1.
class LuFactor {
 public:
  explicit LuFactor(const CMatrix& m);

  CMatrix solve(const CMatrix& rhs) const;
  Index size() const { return lu_.rows(); }

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
};

CMatrix solve_linear(const CMatrix& m, const CMatrix& rhs);

/// Real counterpart, used by the M-matrix test. Throws SingularMatrix.
RMatrix inverse_checked(const RMatrix& m);

enum class SylvesterMethod { Auto, Kronecker, Schur };

struct SylvesterOptions {
  SylvesterMethod method = SylvesterMethod::Auto;
  /// Auto uses the Kronecker system when max(m, n) is at most this.
  Index kronecker_threshold = 32;
};

/// Solves P X + X Q = R for a fixed pair (P, Q) and any number of right-hand
/// sides. The factorization is done once in the constructor.
///
/// The Schur path reduces P and Q to upper triangular form by unitary
/// similarity and back-substitutes column by column. Triangular inputs skip
/// the reduction: an upper triangular factor is used as is and a lower
/// triangular one is flipped to upper form by the reversal permutation.
class SylvesterSolver {
 public:
  SylvesterSolver(const CMatrix& p, const CMatrix& q, SylvesterOptions opts = {});

  CMatrix solve(const CMatrix& r) const;

  /// The path actually taken (never Auto).
  SylvesterMethod method() const { return method_; }

 private:
  enum class Transform { Identity, Reverse, Unitary };

  struct Triangular {
    Transform kind = Transform::Identity;
    CMatrix factor;  // unitary basis when kind == Unitary
    CMatrix upper;   // upper triangular form
  };

  static Triangular reduce(const CMatrix& a);
  static CMatrix to_basis(const Triangular& t, const CMatrix& x, bool left);
  static CMatrix from_basis(const Triangular& t, const CMatrix& y, bool left);

  Index m_ = 0;
  Index n_ = 0;
  SylvesterMethod method_ = SylvesterMethod::Schur;

  // Kronecker path
  std::unique_ptr<LuFactor> kron_lu_;

  // Schur path
  Triangular left_;
  Triangular right_;
  CMatrix left_upper_t_;  // transpose of left_.upper for contiguous row access
};

CMatrix solve_sylvester(const CMatrix& p, const CMatrix& q, const CMatrix& r,
                        SylvesterOptions opts = {});

/// All eigenvalues via Hessenberg reduction and shifted QR. Throws
/// NoConvergence after 100 * n sweeps.
std::vector<Complex> eigenvalues(const CMatrix& m);

/// While alive, subnormal floating-point results are flushed to zero on the
/// current thread. Doubling iterates of banded problems decay into the
/// subnormal range, where arithmetic is several times slower. No-op on
/// targets without SSE control flags.
class SubnormalFlush {
 public:
  SubnormalFlush();
  ~SubnormalFlush();
  SubnormalFlush(const SubnormalFlush&) = delete;
  SubnormalFlush& operator=(const SubnormalFlush&) = delete;

 private:
  unsigned saved_ = 0;
};

/// Largest eigenvalue modulus. Uses eigenvalues() up to dense_limit and power
/// iteration above it.
double spectral_radius(const CMatrix& m, Index dense_limit = 256);

}  // namespace nare
