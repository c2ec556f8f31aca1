#include "nare/generators.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

#include "nare/error.hpp"

namespace nare {

NareProblem gen_example_71(Index n, double xi, double eta, double u, double omega) {
  if (n < 2) throw BadParam("example 7.1 needs n >= 2");
  if (!(u > 0.0 && u < 2.0)) throw BadParam("example 7.1 needs u in (0, 2)");
  CMatrix pm = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    pm(i, i) = Complex(xi, eta);
    if (i + 1 < n) pm(i, i + 1) = -1.0;
  }
  pm(n - 1, 0) = -1.0;
  NareProblem p{pm, u * CMatrix::Identity(n, n), u * CMatrix::Identity(n, n), pm, omega};
  p.validate();
  return p;
}

NareProblem gen_example_72(Index n, double eta, double omega) {
  if (n < 2 || n % 2 != 0) throw BadParam("example 7.2 needs an even n >= 2");
  CMatrix a = CMatrix::Zero(n, n);
  CMatrix d = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double sign = i < n / 2 ? 1.0 : -1.0;
    a(i, i) = Complex(sign * eta, 3.0);
    d(i, i) = Complex(2.0 * sign * eta, 3.0);
  }
  NareProblem p{a, CMatrix::Identity(n, n), CMatrix::Identity(n, n), d, omega};
  p.validate();
  return p;
}

NareProblem gen_random_homega(Index n, Index m, double omega, double margin, std::uint64_t seed) {
  if (n < 1 || m < 1) throw BadParam("random instance needs positive sizes");
  if (!(margin > 0.0)) throw BadParam("random instance needs a positive margin");
  if (!(omega >= 0.0 && omega <= 1.0)) throw BadParam("omega must lie in [0, 1]");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto disc = [&]() {
    return std::polar(std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
  };

  const Index N = n + m;
  CMatrix q(N, N);
  for (Index j = 0; j < N; ++j)
    for (Index i = 0; i < N; ++i) q(i, j) = i == j ? Complex(0.0) : disc();

  const double varpi = omega * omega + (1.0 - omega) * (1.0 - omega);
  const double phi = std::atan2(1.0 - omega, omega);
  for (Index i = 0; i < N; ++i) {
    const double qi = q.row(i).cwiseAbs().sum();
    const double rho = 1.0 + unit(rng);
    const double tilt = (unit(rng) * 2.0 - 1.0) * std::numbers::pi / 3.0;
    // omega-projection of r e^{j(phi + tilt)} is r sqrt(varpi) cos(tilt).
    const double r = (qi + margin) * rho / (std::sqrt(varpi) * std::cos(tilt));
    q(i, i) = std::polar(r, phi + tilt);
  }

  NareProblem p;
  p.D = q.topLeftCorner(n, n);
  p.C = -q.topRightCorner(n, m);
  p.B = -q.bottomLeftCorner(m, n);
  p.A = q.bottomRightCorner(m, m);
  p.omega = omega;
  p.validate();
  if (classify(p).verdict != ClassReport::Verdict::HOmegaStrict) {
    throw Error("random generator produced an instance outside the strict class");
  }
  return p;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* v = std::getenv("RICCATI_SEED");
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw BadParam(std::string("RICCATI_SEED is not an unsigned integer: ") + v);
  }
}

}  // namespace nare
