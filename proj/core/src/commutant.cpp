#include "sidi/commutant.hpp"

#include <algorithm>
#include <string>

namespace sidi {

namespace {

// Relative to ||A|| rather than ||ad_A||: for A = cI plus rounding noise the
// commutator operator is itself noise, and every X should count as commuting.
double commutant_threshold(const CMatrix& a, const Tolerances& tol) {
  return tol.tol_zero * op_norm(a);
}

CMatrix reshape_square(const CVector& v, Eigen::Index n) {
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

Complex frobenius_inner(const CMatrix& x, const CMatrix& y) {
  return (x.array().conjugate() * y.array()).sum();
}

// Largest number of basis elements for which every product pair is checked;
// above it only products with the first element and squares are checked.
constexpr std::size_t kFullClosureCheck = 64;

void check_closure(const CommutantBasis& basis, const Tolerances& tol) {
  const auto& e = basis.elements;
  const double limit = 100.0 * tol.tol_zero;
  auto residual = [&](const CMatrix& p) {
    CMatrix r = p;
    for (const auto& b : e) r -= frobenius_inner(b, p) * b;
    return r.norm() / std::max(1.0, p.norm());
  };
  auto fail = [&](std::size_t i, std::size_t j, double res) {
    throw Error(ErrorCode::IllConditioned,
                "commutant span not closed under multiplication (elements " + std::to_string(i) +
                    "," + std::to_string(j) + ", residual " + std::to_string(res) + ")");
  };
  for (std::size_t i = 0; i < e.size(); ++i) {
    const bool all = e.size() <= kFullClosureCheck;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (!all && i != 0 && i != j) continue;
      const double res = residual(e[i] * e[j]);
      if (res > limit) fail(i, j, res);
    }
  }
  const double id_res = residual(identity(basis.base.rows()));
  if (id_res > limit) {
    throw Error(ErrorCode::IllConditioned, "identity is not in the computed commutant span");
  }
}

}  // namespace

CMatrix commutator_operator(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  const CMatrix id = identity(n);
  CMatrix l(n * n, n * n);
  // vec(XA) = (A^T kron I) vec(X), vec(AX) = (I kron A) vec(X).
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      l.block(p * n, q * n, n, n) = a(q, p) * id;
      if (p == q) l.block(p * n, q * n, n, n) -= a;
    }
  }
  return l;
}

CommutantBasis commutant_basis(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  const Eigen::Index n = a.rows();
  const CMatrix null = nullspace_abs(commutator_operator(a), commutant_threshold(a, tol));
  CommutantBasis out{a, {}};
  out.elements.reserve(null.cols());
  for (Eigen::Index k = 0; k < null.cols(); ++k) {
    out.elements.push_back(reshape_square(null.col(k), n));
  }
  check_closure(out, tol);
  return out;
}

int star_commutant_dim(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  const Eigen::Index n = a.rows();
  CMatrix stacked(2 * n * n, n * n);
  stacked << commutator_operator(a), commutator_operator(a.adjoint());
  return static_cast<int>(nullspace_abs(stacked, commutant_threshold(a, tol)).cols());
}

std::vector<SpectralIdempotent> riesz_decomposition(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  const ClusteredSchur cs = clustered_schur(a, tol);
  const Eigen::Index n = a.rows();
  std::vector<SpectralIdempotent> out;
  out.reserve(cs.clusters.size());
  for (std::size_t k = 0; k < cs.clusters.size(); ++k) {
    SchurForm form = cs.form;
    std::vector<bool> selected(n);
    for (Eigen::Index i = 0; i < n; ++i) selected[i] = cs.labels[i] == static_cast<int>(k);
    reorder_schur(form, selected);
    const Eigen::Index p = cs.clusters[k].multiplicity;
    const Eigen::Index q = n - p;

    SpectralIdempotent s;
    s.eigenvalue = cs.clusters[k].value;
    s.multiplicity = cs.clusters[k].multiplicity;
    s.range_basis = form.q.leftCols(p);
    s.compression = form.t.topLeftCorner(p, p);
    if (q == 0) {
      s.projector = identity(n);
    } else {
      // With Y solving T11 Y - Y T22 = -T12, [I Y; 0 I] block-diagonalizes T
      // and the projector onto the leading block is [I -Y; 0 0].
      const CMatrix y = solve_triangular_sylvester(form.t.topLeftCorner(p, p),
                                                   form.t.bottomRightCorner(q, q),
                                                   -form.t.topRightCorner(p, q));
      CMatrix block = CMatrix::Zero(n, n);
      block.topLeftCorner(p, p) = identity(p);
      block.topRightCorner(p, q) = -y;
      s.projector = form.q * block * form.q.adjoint();
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CMatrix> riesz_idempotents(const CMatrix& a, const Tolerances& tol) {
  std::vector<CMatrix> out;
  for (auto& s : riesz_decomposition(a, tol)) out.push_back(std::move(s.projector));
  return out;
}

}  // namespace sidi
