#pragma once

#include <cstdint>
#include <vector>

#include "sidi/matrix_core.hpp"

namespace sidi {

struct JordanCluster {
  Complex eigenvalue;
  std::vector<int> block_sizes;  ///< descending
};

struct JordanStructure {
  std::vector<JordanCluster> clusters;

  int dimension() const;
  int block_count() const;
};

/// True iff the joint commutant of A and A* is the scalars.
bool is_irreducible(const CMatrix& a, const Tolerances& tol);

/// Finite-dimensional strong irreducibility: one eigenvalue cluster with a
/// one-dimensional eigenspace, i.e. A is similar to a single Jordan block.
bool is_strongly_irreducible(const CMatrix& a, const Tolerances& tol);

/// Jordan block sizes per cluster, read off the nested kernels of A - lambda I
/// restricted to each generalized eigenspace.  The number of blocks of size
/// >= k is dim ker N^k - dim ker N^(k-1).
JordanStructure jordan_structure(const CMatrix& a, const Tolerances& tol);

struct SISplit {
  CMatrix similarity;              ///< X with X A X^-1 block diagonal
  CMatrix basis;                   ///< X^-1; columns grouped per block
  std::vector<CMatrix> blocks;     ///< each strongly irreducible
  std::vector<Complex> eigenvalues;  ///< eigenvalue of each block
  double reconstruction_error = 0.0;  ///< ||X A X^-1 - (+)blocks||
};

/// Splits A into strongly irreducible summands along Jordan chains.  Each
/// chain's span gets an orthonormal basis, so blocks are unitarily similar to
/// Jordan blocks; the chain choice inside a repeated eigenvalue is not
/// norm-optimized.
SISplit si_split(const CMatrix& a, const Tolerances& tol);

struct DunfordSplit {
  CMatrix scalar_part;    ///< S = sum_k lambda_k P_k, diagonalizable
  CMatrix nilpotent_part; ///< R = A - S
};

/// A = S + R with S diagonalizable, R nilpotent, SR = RS.  When every Jordan
/// block has size one, S = A and R = 0 exactly.
DunfordSplit dunford_split(const CMatrix& a, const Tolerances& tol);

/// Damped Gauss-Newton search for idempotents P = sum c_m B_m over the
/// commutant basis, from `trials` random starts.  Returns the distinct
/// nontrivial idempotents found.  Emptiness is evidence, not proof, of strong
/// irreducibility.  Requires dim <= 6.
std::vector<CMatrix> brute_idempotent_search(const CMatrix& a, int trials, const Tolerances& tol,
                                             std::uint64_t seed = 0);

}  // namespace sidi
