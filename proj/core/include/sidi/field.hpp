#pragma once

// Discretized direct integrals: a finite partitioned sample space, operator
// fields over it (one matrix per sample point), and idempotent fields.
// Norms are essential suprema, which on a finite sample is the max over
// points; weights are carried for reporting only.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sidi/matrix_core.hpp"

namespace sidi {

struct SamplePoint {
  std::string label;
  double weight = 1.0;  ///< measure of the cell
  int dim = 1;          ///< fiber dimension
};

class PartitionedSpace {
 public:
  /// Throws InvalidArgument on an empty list, non-positive weight or
  /// dimension, or a repeated label.
  explicit PartitionedSpace(std::vector<SamplePoint> points);

  const std::vector<SamplePoint>& points() const noexcept { return points_; }
  const SamplePoint& point(std::size_t i) const { return points_.at(i); }
  std::size_t size() const noexcept { return points_.size(); }
  int total_dim() const noexcept { return total_dim_; }
  std::optional<std::size_t> index_of(const std::string& label) const;
  std::vector<std::string> labels() const;

  /// Point indices grouped by fiber dimension (the pieces Lambda_n).
  std::map<int, std::vector<std::size_t>> strata() const;

 private:
  std::vector<SamplePoint> points_;
  int total_dim_ = 0;
};

class OperatorField {
 public:
  /// Throws InvalidArgument unless fibers match the space point by point.
  OperatorField(PartitionedSpace space, std::vector<CMatrix> fibers);

  const PartitionedSpace& space() const noexcept { return space_; }
  const std::vector<CMatrix>& fibers() const noexcept { return fibers_; }
  const CMatrix& fiber(std::size_t i) const { return fibers_.at(i); }
  std::size_t size() const noexcept { return fibers_.size(); }

 private:
  PartitionedSpace space_;
  std::vector<CMatrix> fibers_;
};

/// Operator field whose fibers are idempotent (checked at construction).
class IdempotentField {
 public:
  IdempotentField(PartitionedSpace space, std::vector<CMatrix> fibers, const Tolerances& tol);

  const PartitionedSpace& space() const noexcept { return field_.space(); }
  const std::vector<CMatrix>& fibers() const noexcept { return field_.fibers(); }
  const CMatrix& fiber(std::size_t i) const { return field_.fiber(i); }
  const OperatorField& as_operator_field() const noexcept { return field_; }

 private:
  OperatorField field_;
};

/// Largest assembled dimension accepted by assemble().
inline constexpr int kMaxAssembledDim = 512;

/// Discrete essential supremum of the fiber norms.
double field_norm(const OperatorField& f);

/// Block-diagonal matrix of the whole field.  Throws TooLarge past
/// kMaxAssembledDim.
CMatrix assemble(const OperatorField& f);

/// True iff Q commutes with every fiber indicator of F's space, i.e. Q is
/// block diagonal along the fibers and hence decomposable.
bool commutes_with_diagonal(const CMatrix& q, const OperatorField& f, const Tolerances& tol);

/// Max fiber norm over a family of idempotent fields; 0 for an empty family.
/// Throws InvalidArgument if the fields live on different spaces.
double field_bound(std::span<const IdempotentField> family);

/// Replacement of one point by block-diagonal summands.  `similarity` X must
/// bring the fiber A to X A X^-1 = diag of blocks with the given dims.
struct FiberSplit {
  std::size_t point = 0;
  std::vector<int> block_dims;
  CMatrix similarity;
};

/// Splits the listed points into one point per block.  Pieces are labelled
/// "<label>#<k>" and keep the cell weight; unsplit points are copied.
/// Throws NotBlockDiagonalizable when X A X^-1 has off-block residue beyond
/// tolerance.
OperatorField repartition(const OperatorField& f, std::span<const FiberSplit> splits,
                          const Tolerances& tol);

/// Label of piece k when a point is split.
std::string piece_label(const std::string& label, std::size_t k);

/// X(l) A(l) X(l)^-1 at every point.
OperatorField conjugate_field(const OperatorField& f, std::span<const CMatrix> similarities,
                              const Tolerances& tol);

IdempotentField pointwise_join(const IdempotentField& p, const IdempotentField& q,
                               const Tolerances& tol);
IdempotentField pointwise_meet(const IdempotentField& p, const IdempotentField& q,
                               const Tolerances& tol);
IdempotentField pointwise_complement(const IdempotentField& p, const Tolerances& tol);

}  // namespace sidi
