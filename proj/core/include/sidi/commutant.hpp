#pragma once

#include <vector>

#include "sidi/matrix_core.hpp"

namespace sidi {

/// Basis of {A}' = {B : AB = BA}, orthonormal in the Frobenius inner product.
struct CommutantBasis {
  CMatrix base;
  std::vector<CMatrix> elements;

  std::size_t dimension() const noexcept { return elements.size(); }
};

/// Matrix of X -> XA - AX acting on column-major vec(X).
CMatrix commutator_operator(const CMatrix& a);

/// Nullspace of X -> XA - AX, singular values cut at tol_zero * ||A||.  Closure of the span under multiplication is
/// checked; a failure throws IllConditioned since the result would not be an
/// algebra.
CommutantBasis commutant_basis(const CMatrix& a, const Tolerances& tol);

/// dim {X : XA = AX and XA* = A*X}.  Equals 1 exactly when A is irreducible.
int star_commutant_dim(const CMatrix& a, const Tolerances& tol);

/// Spectral idempotent of one eigenvalue cluster, with the data used to
/// build it: an orthonormal basis of its range (the generalized eigenspace)
/// and the compression of A to that range in this basis (upper triangular).
struct SpectralIdempotent {
  Complex eigenvalue;
  int multiplicity = 0;
  CMatrix projector;
  CMatrix range_basis;
  CMatrix compression;
};

/// One idempotent per eigenvalue cluster, computed from a reordered Schur
/// form and a single triangular Sylvester solve for the coupling block.
std::vector<SpectralIdempotent> riesz_decomposition(const CMatrix& a, const Tolerances& tol);

/// The projectors of riesz_decomposition, in cluster order.
std::vector<CMatrix> riesz_idempotents(const CMatrix& a, const Tolerances& tol);

}  // namespace sidi
