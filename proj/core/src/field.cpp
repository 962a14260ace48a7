#include "sidi/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "sidi/idempotent_algebra.hpp"

namespace sidi {

PartitionedSpace::PartitionedSpace(std::vector<SamplePoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "partitioned space has no points");
  std::set<std::string> seen;
  for (const auto& p : points_) {
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
      throw Error(ErrorCode::InvalidArgument, "point '" + p.label + "' has non-positive weight");
    }
    if (p.dim <= 0) {
      throw Error(ErrorCode::InvalidArgument, "point '" + p.label + "' has non-positive dim");
    }
    if (!seen.insert(p.label).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate label '" + p.label + "'");
    }
    total_dim_ += p.dim;
  }
}

std::optional<std::size_t> PartitionedSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].label == label) return i;
  }
  return std::nullopt;
}

std::vector<std::string> PartitionedSpace::labels() const {
  std::vector<std::string> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.label);
  return out;
}

std::map<int, std::vector<std::size_t>> PartitionedSpace::strata() const {
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < points_.size(); ++i) out[points_[i].dim].push_back(i);
  return out;
}

OperatorField::OperatorField(PartitionedSpace space, std::vector<CMatrix> fibers)
    : space_(std::move(space)), fibers_(std::move(fibers)) {
  if (fibers_.size() != space_.size()) {
    throw Error(ErrorCode::InvalidArgument, "fiber count does not match point count");
  }
  for (std::size_t i = 0; i < fibers_.size(); ++i) {
    const auto& p = space_.point(i);
    if (fibers_[i].rows() != p.dim || fibers_[i].cols() != p.dim) {
      throw Error(ErrorCode::InvalidArgument,
                  "fiber at '" + p.label + "' does not have dimension " + std::to_string(p.dim));
    }
    if (!is_finite(fibers_[i])) {
      throw Error(ErrorCode::InvalidArgument, "fiber at '" + p.label + "' is not finite");
    }
  }
}

IdempotentField::IdempotentField(PartitionedSpace space, std::vector<CMatrix> fibers,
                                 const Tolerances& tol)
    : field_(std::move(space), std::move(fibers)) {
  for (std::size_t i = 0; i < field_.size(); ++i) {
    if (!is_idempotent(field_.fiber(i), tol)) {
      throw Error(ErrorCode::NotIdempotent,
                  "fiber at '" + field_.space().point(i).label + "' is not idempotent");
    }
  }
}

double field_norm(const OperatorField& f) {
  double out = 0.0;
  for (const auto& a : f.fibers()) out = std::max(out, op_norm(a));
  return out;
}

CMatrix assemble(const OperatorField& f) {
  if (f.space().total_dim() > kMaxAssembledDim) {
    throw Error(ErrorCode::TooLarge, "assembled dimension " +
                                         std::to_string(f.space().total_dim()) + " exceeds " +
                                         std::to_string(kMaxAssembledDim));
  }
  return direct_sum(f.fibers());
}

bool commutes_with_diagonal(const CMatrix& q, const OperatorField& f, const Tolerances& tol) {
  const Eigen::Index n = f.space().total_dim();
  if (q.rows() != n || q.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "operator does not act on the assembled space");
  }
  const double limit = tol.check() * std::max(1.0, op_norm(q));
  Eigen::Index offset = 0;
  for (const auto& p : f.space().points()) {
    // Q D - D Q for the indicator D of this point is the off-diagonal part of
    // its block row and block column.
    CMatrix row = q.middleRows(offset, p.dim);
    CMatrix col = q.middleCols(offset, p.dim);
    row.middleCols(offset, p.dim).setZero();
    col.middleRows(offset, p.dim).setZero();
    if (op_norm(row) > limit || op_norm(col) > limit) return false;
    offset += p.dim;
  }
  return true;
}

double field_bound(std::span<const IdempotentField> family) {
  double out = 0.0;
  for (const auto& f : family) {
    if (f.space().labels() != family.front().space().labels()) {
      throw Error(ErrorCode::InvalidArgument, "idempotent fields live on different spaces");
    }
    out = std::max(out, field_norm(f.as_operator_field()));
  }
  return out;
}

std::string piece_label(const std::string& label, std::size_t k) {
  return label + "#" + std::to_string(k);
}

OperatorField repartition(const OperatorField& f, std::span<const FiberSplit> splits,
                          const Tolerances& tol) {
  std::vector<const FiberSplit*> by_point(f.size(), nullptr);
  for (const auto& s : splits) {
    if (s.point >= f.size()) throw Error(ErrorCode::InvalidArgument, "split point out of range");
    if (by_point[s.point] != nullptr) {
      throw Error(ErrorCode::InvalidArgument, "point split twice");
    }
    by_point[s.point] = &s;
  }

  std::vector<SamplePoint> points;
  std::vector<CMatrix> fibers;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& point = f.space().point(i);
    const FiberSplit* split = by_point[i];
    if (split == nullptr) {
      points.push_back(point);
      fibers.push_back(f.fiber(i));
      continue;
    }
    int total = 0;
    for (int d : split->block_dims) {
      if (d <= 0) throw Error(ErrorCode::InvalidArgument, "block dims must be positive");
      total += d;
    }
    if (total != point.dim || split->similarity.rows() != point.dim) {
      throw Error(ErrorCode::InvalidArgument, "split of '" + point.label +
                                                  "' does not preserve the fiber dimension");
    }
    const CMatrix& a = f.fiber(i);
    const CMatrix& x = split->similarity;
    const CMatrix conjugated = x * a * inverse(x, tol);
    CMatrix residue = conjugated;
    Eigen::Index offset = 0;
    for (int d : split->block_dims) {
      residue.block(offset, offset, d, d).setZero();
      offset += d;
    }
    const double limit =
        tol.check() * condition_number(x) * std::max(op_norm(a), std::numeric_limits<double>::min());
    if (op_norm(residue) > limit) {
      throw Error(ErrorCode::NotBlockDiagonalizable,
                  "similarity leaves off-diagonal residue " + std::to_string(op_norm(residue)) +
                      " at '" + point.label + "'");
    }
    if (split->block_dims.size() == 1) {
      points.push_back(point);
      fibers.push_back(conjugated);
      continue;
    }
    offset = 0;
    for (std::size_t k = 0; k < split->block_dims.size(); ++k) {
      const int d = split->block_dims[k];
      points.push_back({piece_label(point.label, k), point.weight, d});
      fibers.push_back(conjugated.block(offset, offset, d, d));
      offset += d;
    }
  }
  return OperatorField(PartitionedSpace(std::move(points)), std::move(fibers));
}

OperatorField conjugate_field(const OperatorField& f, std::span<const CMatrix> similarities,
                              const Tolerances& tol) {
  if (similarities.size() != f.size()) {
    throw Error(ErrorCode::InvalidArgument, "one similarity per point is required");
  }
  std::vector<CMatrix> fibers;
  fibers.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    fibers.push_back(similarities[i] * f.fiber(i) * inverse(similarities[i], tol));
  }
  return OperatorField(f.space(), std::move(fibers));
}

namespace {

template <typename Op>
IdempotentField pointwise(const IdempotentField& p, const IdempotentField& q, Op op,
                          const Tolerances& tol) {
  if (p.space().labels() != q.space().labels()) {
    throw Error(ErrorCode::InvalidArgument, "idempotent fields live on different spaces");
  }
  std::vector<CMatrix> fibers;
  for (std::size_t i = 0; i < p.space().size(); ++i) fibers.push_back(op(p.fiber(i), q.fiber(i)));
  return IdempotentField(p.space(), std::move(fibers), tol);
}

}  // namespace

IdempotentField pointwise_join(const IdempotentField& p, const IdempotentField& q,
                               const Tolerances& tol) {
  return pointwise(
      p, q, [&](const CMatrix& a, const CMatrix& b) { return join(a, b, tol); }, tol);
}

IdempotentField pointwise_meet(const IdempotentField& p, const IdempotentField& q,
                               const Tolerances& tol) {
  return pointwise(
      p, q, [&](const CMatrix& a, const CMatrix& b) { return meet(a, b, tol); }, tol);
}

IdempotentField pointwise_complement(const IdempotentField& p, const Tolerances& tol) {
  std::vector<CMatrix> fibers;
  for (const auto& e : p.fibers()) fibers.push_back(complement(e, tol));
  return IdempotentField(p.space(), std::move(fibers), tol);
}

}  // namespace sidi
