#pragma once

#include <stdexcept>
#include <string>

namespace logpair {

/// Adaptive quadrature ran out of subdivision depth with the error estimate
/// still above tolerance; the integrand is pathological for the given spec.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// A point or index fell outside the validity range of the two-term ladder
/// approximations; the caller must fall back to the full series.
struct OutOfLadder : std::runtime_error {
  explicit OutOfLadder(const std::string& what) : std::runtime_error(what) {}
};

/// Balancing descent hit the iteration cap. Carries the best residual seen and
/// the size of the group parameter, so a residual plateau with diverging
/// weights (the strictly-semistable signature) can be told apart from a slow
/// solve.
struct MaxIterExceeded : std::runtime_error {
  double best_residual;
  double tau_norm;
  int iterations;
  MaxIterExceeded(const std::string& what, double residual, double tnorm, int iters)
      : std::runtime_error(what), best_residual(residual), tau_norm(tnorm), iterations(iters) {}
};

/// The deviation ledger was asked for a mu value that was never computed.
struct MissingMu : std::runtime_error {
  explicit MissingMu(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace logpair
