#include "sidi/idempotent_algebra.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "sidi/si_analysis.hpp"

namespace sidi {

namespace {

void require_idempotent(const CMatrix& p, const Tolerances& tol) {
  require_valid(p);
  if (!is_idempotent(p, tol)) {
    throw Error(ErrorCode::NotIdempotent,
                "||P^2 - P|| = " + std::to_string(op_norm(p * p - p)) + " exceeds tolerance");
  }
}

void require_commuting(const CMatrix& p, const CMatrix& q, const Tolerances& tol) {
  if (p.rows() != q.rows()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const double scale = op_norm(p) * op_norm(q);
  if (op_norm(p * q - q * p) > tol.check() * std::max(scale, 1.0)) {
    throw Error(ErrorCode::NotCommuting, "idempotents do not commute");
  }
}

}  // namespace

bool is_idempotent(const CMatrix& p, const Tolerances& tol) {
  const double norm = op_norm(p);
  return op_norm(p * p - p) <= tol.check() * std::max(1.0, norm * norm);
}

CMatrix join(const CMatrix& p, const CMatrix& q, const Tolerances& tol) {
  require_idempotent(p, tol);
  require_idempotent(q, tol);
  require_commuting(p, q, tol);
  return p + q - p * q;
}

CMatrix meet(const CMatrix& p, const CMatrix& q, const Tolerances& tol) {
  require_idempotent(p, tol);
  require_idempotent(q, tol);
  require_commuting(p, q, tol);
  return p * q;
}

CMatrix complement(const CMatrix& p, const Tolerances& tol) {
  require_idempotent(p, tol);
  return identity(p.rows()) - p;
}

IdempotentAlgebra IdempotentAlgebra::from_atoms(std::vector<CMatrix> atoms,
                                                const Tolerances& tol) {
  if (atoms.empty()) throw Error(ErrorCode::InvalidArgument, "algebra needs at least one atom");
  const Eigen::Index n = atoms.front().rows();
  CMatrix sum = CMatrix::Zero(n, n);
  std::vector<double> norms;
  for (const auto& e : atoms) {
    if (e.rows() != n) throw Error(ErrorCode::InvalidArgument, "atom dimension mismatch");
    require_idempotent(e, tol);
    norms.push_back(op_norm(e));
    sum += e;
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (j == k) continue;
      if (op_norm(atoms[j] * atoms[k]) > tol.check() * std::max(1.0, norms[j] * norms[k])) {
        throw Error(ErrorCode::NotCommuting,
                    "atoms " + std::to_string(j) + " and " + std::to_string(k) +
                        " do not annihilate");
      }
    }
  }
  double total = 0.0;
  for (double v : norms) total += v;
  if (op_norm(sum - identity(n)) > tol.check() * std::max(1.0, total)) {
    throw Error(ErrorCode::InvalidArgument, "atoms do not sum to the identity");
  }
  return IdempotentAlgebra(n, std::move(atoms));
}

CMatrix IdempotentAlgebra::element(std::uint64_t mask) const {
  CMatrix out = CMatrix::Zero(dim_, dim_);
  for (std::size_t j = 0; j < atoms_.size() && j < 64; ++j) {
    if (mask >> j & 1U) out += atoms_[j];
  }
  return out;
}

IdempotentAlgebra IdempotentAlgebra::conjugated(const CMatrix& x, const Tolerances& tol) const {
  const CMatrix xinv = inverse(x, tol);
  std::vector<CMatrix> out;
  out.reserve(atoms_.size());
  for (const auto& e : atoms_) out.push_back(x * e * xinv);
  return from_atoms(std::move(out), tol);
}

IdempotentAlgebra generate(std::span<const CMatrix> seeds, const Tolerances& tol) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "no seeds");
  const Eigen::Index n = seeds.front().rows();
  for (const auto& s : seeds) require_idempotent(s, tol);
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    for (std::size_t k = j + 1; k < seeds.size(); ++k) require_commuting(seeds[j], seeds[k], tol);
  }
  // A nonzero idempotent has norm >= 1, so 1/2 separates zero products cleanly.
  constexpr double kZero = 0.5;
  std::vector<CMatrix> atoms{identity(n)};
  for (const auto& s : seeds) {
    const CMatrix c = identity(n) - s;
    std::vector<CMatrix> next;
    for (const auto& e : atoms) {
      CMatrix in = e * s;
      CMatrix out = e * c;
      if (op_norm(in) > kZero) next.push_back(std::move(in));
      if (op_norm(out) > kZero) next.push_back(std::move(out));
    }
    if (static_cast<Eigen::Index>(next.size()) > n) {
      throw Error(ErrorCode::IllConditioned, "more atoms than the dimension allows");
    }
    atoms = std::move(next);
  }
  return IdempotentAlgebra::from_atoms(std::move(atoms), tol);
}

AlgebraBound algebra_bound(const IdempotentAlgebra& alg) {
  const auto& atoms = alg.atoms();
  const std::size_t k = atoms.size();
  AlgebraBound out;
  if (k > kMaxEnumeratedAtoms) {
    out.capped = true;
    const CMatrix id = identity(alg.dim());
    for (const auto& e : atoms) {
      for (CMatrix candidate : {CMatrix(e), CMatrix(id - e)}) {
        const double v = op_norm(candidate);
        if (v > out.value) {
          out.value = v;
          out.maximizer = std::move(candidate);
        }
      }
    }
    return out;
  }
  // Gray-code walk: each step toggles one atom in the running sum.
  CMatrix sum = CMatrix::Zero(alg.dim(), alg.dim());
  out.maximizer = sum;
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << k); ++i) {
    const int bit = std::countr_zero(i);
    gray ^= std::uint64_t{1} << bit;
    if (gray >> bit & 1U) {
      sum += atoms[bit];
    } else {
      sum -= atoms[bit];
    }
    const double v = op_norm(sum);
    if (v > out.value) {
      out.value = v;
      out.maximizer = sum;
    }
  }
  return out;
}

CMatrix orthogonalize(const IdempotentAlgebra& alg, const Tolerances& tol) {
  CMatrix s = CMatrix::Zero(alg.dim(), alg.dim());
  for (const auto& e : alg.atoms()) s += e.adjoint() * e;
  try {
    return pd_sqrt(s, tol);
  } catch (const Error& err) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string("internal consistency failure: ") + err.what());
  }
}

CMatrix compress_to_range(const CMatrix& a, const CMatrix& e) {
  // Nonzero singular values of an idempotent are >= 1.
  const CMatrix u = orth(e, 0.5);
  return u.adjoint() * a * u;
}

MaximalityReport is_maximal_in_commutant(const CMatrix& a, const IdempotentAlgebra& alg,
                                         const Tolerances& tol) {
  require_valid(a);
  if (a.rows() != alg.dim()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const double anorm = op_norm(a);
  const auto& atoms = alg.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const CMatrix& e = atoms[j];
    if (op_norm(e * a - a * e) > tol.check() * std::max(1.0, anorm * op_norm(e))) {
      throw Error(ErrorCode::NotInCommutant, "atom " + std::to_string(j) + " does not commute");
    }
  }
  MaximalityReport report;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const CMatrix c = compress_to_range(a, atoms[j]);
    try {
      if (!is_strongly_irreducible(c, tol)) {
        report.failing_atoms.push_back(j);
        report.notes.push_back("atom " + std::to_string(j) + ": compression of dim " +
                               std::to_string(c.rows()) + " is not strongly irreducible");
      }
    } catch (const Error& err) {
      report.failing_atoms.push_back(j);
      report.notes.push_back("atom " + std::to_string(j) + ": " + err.what());
    }
  }
  report.maximal = report.failing_atoms.empty();
  return report;
}

}  // namespace sidi
