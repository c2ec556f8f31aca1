#include "nare/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "nare/error.hpp"

#if defined(__SSE__)
#include <xmmintrin.h>
#define NARE_HAVE_MXCSR 1
#endif

namespace nare {

RMatrix abs_entrywise(const CMatrix& m) { return m.cwiseAbs(); }

double one_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double one_norm(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

CMatrix kron(const CMatrix& p, const CMatrix& q) {
  CMatrix out(p.rows() * q.rows(), p.cols() * q.cols());
  for (Index j = 0; j < p.cols(); ++j) {
    for (Index i = 0; i < p.rows(); ++i) {
      out.block(i * q.rows(), j * q.cols(), q.rows(), q.cols()) = p(i, j) * q;
    }
  }
  return out;
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw BadParam("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

bool all_finite(const CMatrix& m) {
  for (Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

namespace {

template <typename Lu>
void check_pivots(const Lu& lu, double norm, const char* who) {
  const auto& packed = lu.matrixLU();
  const double cutoff = kPivotTolerance * norm;
  for (Index i = 0; i < packed.rows(); ++i) {
    const double piv = std::abs(packed(i, i));
    if (!(piv > cutoff) || !std::isfinite(piv)) {
      std::ostringstream os;
      os << who << ": pivot " << i << " has modulus " << piv << " <= " << cutoff;
      throw SingularMatrix(os.str());
    }
  }
}

}  // namespace

LuFactor::LuFactor(const CMatrix& m) {
  if (m.rows() != m.cols()) throw BadParam("LuFactor: matrix is not square");
  lu_.compute(m);
  check_pivots(lu_, one_norm(m), "LuFactor");
}

CMatrix LuFactor::solve(const CMatrix& rhs) const {
  if (rhs.rows() != lu_.rows()) throw BadParam("LuFactor::solve: row mismatch");
  return lu_.solve(rhs);
}

CMatrix solve_linear(const CMatrix& m, const CMatrix& rhs) { return LuFactor(m).solve(rhs); }

RMatrix inverse_checked(const RMatrix& m) {
  if (m.rows() != m.cols()) throw BadParam("inverse_checked: matrix is not square");
  Eigen::PartialPivLU<RMatrix> lu(m);
  check_pivots(lu, one_norm(m), "inverse_checked");
  return lu.inverse();
}

// ---------------------------------------------------------------------------
// Sylvester

namespace {

enum class Shape { Upper, Lower, Full };

Shape triangular_shape(const CMatrix& a) {
  bool upper = true;
  bool lower = true;
  for (Index j = 0; j < a.cols() && (upper || lower); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) == Complex(0.0)) continue;
      if (i > j) upper = false;
      if (i < j) lower = false;
    }
  }
  if (upper) return Shape::Upper;
  if (lower) return Shape::Lower;
  return Shape::Full;
}

CMatrix reverse_rows(const CMatrix& x) { return x.colwise().reverse(); }
CMatrix reverse_cols(const CMatrix& x) { return x.rowwise().reverse(); }

}  // namespace

SylvesterSolver::Triangular SylvesterSolver::reduce(const CMatrix& a) {
  Triangular t;
  switch (triangular_shape(a)) {
    case Shape::Upper:
      t.kind = Transform::Identity;
      t.upper = a;
      break;
    case Shape::Lower:
      // J A J is upper triangular for the reversal permutation J.
      t.kind = Transform::Reverse;
      t.upper = a.reverse();
      break;
    case Shape::Full: {
      Eigen::ComplexSchur<CMatrix> schur(a.rows());
      schur.setMaxIterations(100 * std::max<Index>(a.rows(), 1));
      schur.compute(a, true);
      if (schur.info() != Eigen::Success) {
        throw NoConvergence("SylvesterSolver: complex Schur reduction did not converge");
      }
      t.kind = Transform::Unitary;
      t.factor = schur.matrixU();
      t.upper = schur.matrixT();
      break;
    }
  }
  return t;
}

// For the left factor P = U S U^H we need U^H X; for the right factor
// Q = V T V^H we need X V.
CMatrix SylvesterSolver::to_basis(const Triangular& t, const CMatrix& x, bool left) {
  switch (t.kind) {
    case Transform::Identity:
      return x;
    case Transform::Reverse:
      return left ? reverse_rows(x) : reverse_cols(x);
    case Transform::Unitary:
      return left ? CMatrix(t.factor.adjoint() * x) : CMatrix(x * t.factor);
  }
  return x;
}

CMatrix SylvesterSolver::from_basis(const Triangular& t, const CMatrix& y, bool left) {
  switch (t.kind) {
    case Transform::Identity:
      return y;
    case Transform::Reverse:
      return left ? reverse_rows(y) : reverse_cols(y);
    case Transform::Unitary:
      return left ? CMatrix(t.factor * y) : CMatrix(y * t.factor.adjoint());
  }
  return y;
}

SylvesterSolver::SylvesterSolver(const CMatrix& p, const CMatrix& q, SylvesterOptions opts)
    : m_(p.rows()), n_(q.rows()) {
  if (p.rows() != p.cols() || q.rows() != q.cols()) {
    throw BadParam("SylvesterSolver: coefficients must be square");
  }
  method_ = opts.method;
  if (method_ == SylvesterMethod::Auto) {
    const bool structured =
        triangular_shape(p) != Shape::Full && triangular_shape(q) != Shape::Full;
    method_ = (!structured && std::max(m_, n_) <= opts.kronecker_threshold)
                  ? SylvesterMethod::Kronecker
                  : SylvesterMethod::Schur;
  }

  const double scale = one_norm(p) + one_norm(q);
  if (method_ == SylvesterMethod::Kronecker) {
    const CMatrix op = kron(q.transpose(), CMatrix::Identity(m_, m_)) +
                       kron(CMatrix::Identity(n_, n_), p);
    try {
      kron_lu_ = std::make_unique<LuFactor>(op);
    } catch (const SingularMatrix& e) {
      throw SylvesterSingular(std::string("Kronecker operator singular: ") + e.what());
    }
    return;
  }

  left_ = reduce(p);
  right_ = reduce(q);
  left_upper_t_ = left_.upper.transpose();
  const double cutoff = kPivotTolerance * scale;
  for (Index j = 0; j < n_; ++j) {
    for (Index i = 0; i < m_; ++i) {
      const double piv = std::abs(left_.upper(i, i) + right_.upper(j, j));
      if (!(piv > cutoff)) {
        std::ostringstream os;
        os << "SylvesterSolver: eigenvalue " << left_.upper(i, i) << " of P and "
           << right_.upper(j, j) << " of Q sum to " << piv;
        throw SylvesterSingular(os.str());
      }
    }
  }
}

CMatrix SylvesterSolver::solve(const CMatrix& r) const {
  if (r.rows() != m_ || r.cols() != n_) throw BadParam("SylvesterSolver::solve: shape mismatch");
  if (method_ == SylvesterMethod::Kronecker) {
    return unvec(kron_lu_->solve(vec(r)), m_, n_);
  }

  // S Y + Y T = F with S, T upper triangular.
  const CMatrix f = to_basis(right_, to_basis(left_, r, true), false);
  const CMatrix& t = right_.upper;
  CMatrix y(m_, n_);
  CVector rhs(m_);
  for (Index j = 0; j < n_; ++j) {
    rhs = f.col(j);
    if (j > 0) rhs.noalias() -= y.leftCols(j) * t.col(j).head(j);
    const Complex shift = t(j, j);
    for (Index i = m_ - 1; i >= 0; --i) {
      Complex acc = rhs(i);
      const Index tail = m_ - 1 - i;
      if (tail > 0) {
        acc -= (left_upper_t_.col(i).tail(tail).array() * y.col(j).tail(tail).array()).sum();
      }
      y(i, j) = acc / (left_.upper(i, i) + shift);
    }
  }
  return from_basis(left_, from_basis(right_, y, false), true);
}

CMatrix solve_sylvester(const CMatrix& p, const CMatrix& q, const CMatrix& r,
                        SylvesterOptions opts) {
  return SylvesterSolver(p, q, opts).solve(r);
}

#if defined(NARE_HAVE_MXCSR)
// FTZ (bit 15) and DAZ (bit 6).
SubnormalFlush::SubnormalFlush() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
SubnormalFlush::~SubnormalFlush() { _mm_setcsr(saved_); }
#else
SubnormalFlush::SubnormalFlush() = default;
SubnormalFlush::~SubnormalFlush() = default;
#endif

// ---------------------------------------------------------------------------
// Eigenvalues

std::vector<Complex> eigenvalues(const CMatrix& m) {
  if (m.rows() != m.cols()) throw BadParam("eigenvalues: matrix is not square");
  const Index n = m.rows();
  if (n == 0) return {};
  Eigen::ComplexSchur<CMatrix> schur(n);
  schur.setMaxIterations(100 * n);
  schur.compute(m, false);
  if (schur.info() != Eigen::Success) {
    throw NoConvergence("eigenvalues: shifted QR did not converge in 100*n sweeps");
  }
  const CMatrix& t = schur.matrixT();
  std::vector<Complex> out(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<size_t>(i)] = t(i, i);
  return out;
}

double spectral_radius(const CMatrix& m, Index dense_limit) {
  if (m.rows() != m.cols()) throw BadParam("spectral_radius: matrix is not square");
  const Index n = m.rows();
  if (n == 0) return 0.0;

  auto dense = [&]() {
    double rho = 0.0;
    for (const Complex& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
    return rho;
  };
  if (n <= dense_limit) return dense();

  // Power iteration from a fixed, generic start vector.
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.01 * static_cast<double>(i % 7), 0.5);
  v.normalize();
  double prev = -1.0;
  for (int step = 0; step < 200; ++step) {
    CVector w = m * v;
    const double estimate = std::abs(v.dot(w));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (prev >= 0.0 && std::abs(estimate - prev) <= 1e-8 * std::max(estimate, 1e-300)) {
      return estimate;
    }
    prev = estimate;
  }
  // Ties in modulus (e.g. complex-conjugate pairs) stall the Rayleigh quotient.
  return dense();
}

}  // namespace nare
