#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sidi/matrix_core.hpp"

namespace sidi {

/// P + Q - PQ.  Throws NotIdempotent / NotCommuting.
CMatrix join(const CMatrix& p, const CMatrix& q, const Tolerances& tol);

/// PQ.  Throws NotIdempotent / NotCommuting.
CMatrix meet(const CMatrix& p, const CMatrix& q, const Tolerances& tol);

/// I - P.  Throws NotIdempotent.
CMatrix complement(const CMatrix& p, const Tolerances& tol);

bool is_idempotent(const CMatrix& p, const Tolerances& tol);

/// Finite abelian Boolean algebra of idempotents, held by its atoms.
/// Elements are the 2^k sums of subsets of atoms.
class IdempotentAlgebra {
 public:
  /// Validates the atom invariants: idempotent, pairwise annihilating,
  /// summing to the identity.
  static IdempotentAlgebra from_atoms(std::vector<CMatrix> atoms, const Tolerances& tol);

  Eigen::Index dim() const noexcept { return dim_; }
  const std::vector<CMatrix>& atoms() const noexcept { return atoms_; }

  /// Sum of the atoms whose bit is set in `mask` (bit j selects atom j).
  CMatrix element(std::uint64_t mask) const;

  /// X E X^-1 for every atom.
  IdempotentAlgebra conjugated(const CMatrix& x, const Tolerances& tol) const;

 private:
  IdempotentAlgebra(Eigen::Index dim, std::vector<CMatrix> atoms)
      : dim_(dim), atoms_(std::move(atoms)) {}

  Eigen::Index dim_;
  std::vector<CMatrix> atoms_;
};

/// Boolean algebra generated by pairwise commuting idempotents.
IdempotentAlgebra generate(std::span<const CMatrix> seeds, const Tolerances& tol);

struct AlgebraBound {
  double value = 0.0;
  bool capped = false;  ///< true when only atoms and their complements were scanned
  CMatrix maximizer;    ///< an element attaining `value`
};

/// Algebra elements enumerated exhaustively up to this many atoms.
inline constexpr std::size_t kMaxEnumeratedAtoms = 20;

/// Max operator norm over all elements (or, past kMaxEnumeratedAtoms atoms,
/// over atoms and their complements with `capped` set).
AlgebraBound algebra_bound(const IdempotentAlgebra& alg);

/// X = (sum_j E_j* E_j)^(1/2).  Since S E_j = E_j* S, every X E X^-1 is an
/// orthogonal projection.
CMatrix orthogonalize(const IdempotentAlgebra& alg, const Tolerances& tol);

struct MaximalityReport {
  bool maximal = false;
  std::vector<std::size_t> failing_atoms;
  std::vector<std::string> notes;
};

/// The algebra is maximal abelian in {A}' iff A compressed to the range of
/// each atom is strongly irreducible.  Throws NotInCommutant when some atom
/// does not commute with A.
MaximalityReport is_maximal_in_commutant(const CMatrix& a, const IdempotentAlgebra& alg,
                                         const Tolerances& tol);

/// A restricted to range(E), in an orthonormal basis of that range.
CMatrix compress_to_range(const CMatrix& a, const CMatrix& e);

}  // namespace sidi
