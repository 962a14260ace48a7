#include "sidi/si_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sidi/commutant.hpp"

namespace sidi {

int JordanStructure::dimension() const {
  int total = 0;
  for (const auto& c : clusters) {
    for (int s : c.block_sizes) total += s;
  }
  return total;
}

int JordanStructure::block_count() const {
  int total = 0;
  for (const auto& c : clusters) total += static_cast<int>(c.block_sizes.size());
  return total;
}

namespace {

// A rank decision whose deciding singular value is within this factor of the
// threshold is reported as ill-conditioned.
constexpr double kMarginFactor = 2.0;

struct ClusterAnalysis {
  Complex eigenvalue;
  CMatrix range_basis;   // orthonormal, n x m
  CMatrix nilpotent;     // compression minus eigenvalue, m x m
  Staircase staircase;
  std::vector<int> at_least;  // at_least[j] = #blocks of size >= j+1
};

std::vector<ClusterAnalysis> analyze_clusters(const CMatrix& a, const Tolerances& tol) {
  const double threshold = tol.tol_zero * op_norm(a);
  std::vector<ClusterAnalysis> out;
  for (auto& s : riesz_decomposition(a, tol)) {
    ClusterAnalysis c;
    c.eigenvalue = s.eigenvalue;
    c.range_basis = std::move(s.range_basis);
    c.nilpotent = s.compression;
    c.nilpotent.diagonal().array() -= s.eigenvalue;
    c.staircase = nilpotent_staircase(c.nilpotent, threshold);
    if (!c.staircase.complete) {
      throw Error(ErrorCode::IllConditioned,
                  "eigenvalue cluster is not numerically scalar plus nilpotent; adjust tol_cluster");
    }
    if (c.staircase.margin < kMarginFactor) {
      throw Error(ErrorCode::IllConditioned, "marginal rank decision in Jordan analysis");
    }
    int previous = 0;
    for (int d : c.staircase.kernel_dims) {
      c.at_least.push_back(d - previous);
      previous = d;
    }
    for (std::size_t j = 1; j < c.at_least.size(); ++j) {
      if (c.at_least[j] > c.at_least[j - 1]) {
        throw Error(ErrorCode::IllConditioned, "inconsistent kernel dimension sequence");
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<int> block_sizes(const std::vector<int>& at_least) {
  std::vector<int> sizes;
  for (std::size_t j = at_least.size(); j-- > 0;) {
    const int next = j + 1 < at_least.size() ? at_least[j + 1] : 0;
    for (int k = 0; k < at_least[j] - next; ++k) sizes.push_back(static_cast<int>(j) + 1);
  }
  return sizes;
}

// Orthonormal basis of a Jordan chain's span.  Columns ordered from the
// eigenvector up to the generator, with phases fixed so that R has a
// positive diagonal.
CMatrix chain_basis(const CMatrix& chain) {
  Eigen::HouseholderQR<CMatrix> qr(chain);
  CMatrix q = qr.householderQ() * CMatrix::Identity(chain.rows(), chain.cols());
  const CMatrix r = qr.matrixQR().topRows(chain.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < chain.cols(); ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

// Jordan chain bases (in cluster coordinates) for one cluster, longest first.
std::vector<CMatrix> cluster_chains(const ClusterAnalysis& c) {
  const CMatrix& n = c.nilpotent;
  const Eigen::Index m = n.rows();
  const auto levels = static_cast<int>(c.at_least.size());
  const auto& dims = c.staircase.kernel_dims;

  struct Chain {
    CVector generator;
    int length;
    CVector current;  // N^(length - level) generator
  };
  std::vector<Chain> chains;

  for (int level = levels; level >= 1; --level) {
    const int below = level >= 2 ? dims[level - 2] : 0;
    const int width = dims[level - 1] - below;
    const int above = level < levels ? c.at_least[level] : 0;
    const int needed = c.at_least[level - 1] - above;

    for (auto& ch : chains) {
      if (ch.length > level) ch.current = n * ch.current;
    }
    if (needed <= 0) continue;

    const CMatrix lower = c.staircase.basis.leftCols(below);
    const CMatrix fresh = c.staircase.basis.middleCols(below, width);
    CMatrix existing(m, static_cast<Eigen::Index>(chains.size()));
    for (std::size_t k = 0; k < chains.size(); ++k) {
      CVector v = chains[k].current;
      if (below > 0) v -= lower * (lower.adjoint() * v);
      existing.col(static_cast<Eigen::Index>(k)) = v;
    }
    CMatrix candidates = fresh;
    if (existing.cols() > 0) {
      const CMatrix u = orth(existing, 1e-12 * std::max(1.0, existing.norm()));
      candidates -= u * (u.adjoint() * candidates);
    }
    Eigen::JacobiSVD<CMatrix> svd(candidates, Eigen::ComputeThinU);
    for (int k = 0; k < needed; ++k) {
      const CVector g = svd.matrixU().col(k);
      chains.push_back({g, level, g});
    }
  }

  std::vector<CMatrix> bases;
  for (const auto& ch : chains) {
    CMatrix chain(m, ch.length);
    CVector v = ch.generator;
    for (int k = ch.length - 1; k >= 0; --k) {
      chain.col(k) = v;
      v = n * v;
    }
    bases.push_back(chain_basis(chain));
  }
  std::stable_sort(bases.begin(), bases.end(),
                   [](const CMatrix& x, const CMatrix& y) { return x.cols() > y.cols(); });
  return bases;
}

}  // namespace

bool is_irreducible(const CMatrix& a, const Tolerances& tol) {
  return star_commutant_dim(a, tol) == 1;
}

bool is_strongly_irreducible(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  const auto clusters = analyze_clusters(a, tol);
  return clusters.size() == 1 && clusters.front().at_least.front() == 1;
}

JordanStructure jordan_structure(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  JordanStructure out;
  for (const auto& c : analyze_clusters(a, tol)) {
    out.clusters.push_back({c.eigenvalue, block_sizes(c.at_least)});
  }
  return out;
}

SISplit si_split(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  const Eigen::Index n = a.rows();
  SISplit out;
  out.basis = CMatrix(n, n);
  Eigen::Index col = 0;
  std::vector<Eigen::Index> sizes;
  for (const auto& c : analyze_clusters(a, tol)) {
    for (const auto& chain : cluster_chains(c)) {
      out.basis.middleCols(col, chain.cols()) = c.range_basis * chain;
      col += chain.cols();
      sizes.push_back(chain.cols());
      out.eigenvalues.push_back(c.eigenvalue);
    }
  }
  if (col != n) throw Error(ErrorCode::IllConditioned, "Jordan chains do not span the space");
  try {
    out.similarity = inverse(out.basis, tol);
  } catch (const Error&) {
    throw Error(ErrorCode::IllConditioned, "Jordan basis is numerically singular");
  }
  const CMatrix conjugated = out.similarity * a * out.basis;
  CMatrix assembled = CMatrix::Zero(n, n);
  Eigen::Index offset = 0;
  for (Eigen::Index s : sizes) {
    out.blocks.push_back(conjugated.block(offset, offset, s, s));
    assembled.block(offset, offset, s, s) = out.blocks.back();
    offset += s;
  }
  out.reconstruction_error = op_norm(conjugated - assembled);
  return out;
}

DunfordSplit dunford_split(const CMatrix& a, const Tolerances& tol) {
  require_valid(a);
  const auto clusters = analyze_clusters(a, tol);
  const bool semisimple = std::all_of(clusters.begin(), clusters.end(), [](const auto& c) {
    return c.at_least.size() == 1;
  });
  const Eigen::Index n = a.rows();
  if (semisimple) return {a, CMatrix::Zero(n, n)};
  CMatrix s = CMatrix::Zero(n, n);
  for (const auto& r : riesz_decomposition(a, tol)) s += r.eigenvalue * r.projector;
  CMatrix r = a - s;
  return {std::move(s), std::move(r)};
}

std::vector<CMatrix> brute_idempotent_search(const CMatrix& a, int trials, const Tolerances& tol,
                                             std::uint64_t seed) {
  require_valid(a);
  if (a.rows() > 6) {
    throw Error(ErrorCode::InvalidArgument, "brute idempotent search is limited to dim <= 6");
  }
  if (trials < 0) throw Error(ErrorCode::InvalidArgument, "trials must be non-negative");
  const Eigen::Index n = a.rows();
  const auto basis = commutant_basis(a, tol).elements;
  const auto d = static_cast<Eigen::Index>(basis.size());
  constexpr int kMaxIterations = 100;
  constexpr double kDamping = 0.5;
  constexpr double kDedup = 1e-6;

  auto assemble = [&](const CVector& c) {
    CMatrix p = CMatrix::Zero(n, n);
    for (Eigen::Index m = 0; m < d; ++m) p += c(m) * basis[m];
    return p;
  };
  auto residual = [](const CMatrix& p) { return (p * p - p).norm(); };
  auto converged = [](const CMatrix& p, double res) {
    return res <= 1e-12 * std::max(1.0, p.squaredNorm());
  };

  std::vector<CMatrix> found;
  for (int t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    CVector c(d);
    for (Eigen::Index m = 0; m < d; ++m) c(m) = Complex(normal(rng), normal(rng));

    CMatrix p = assemble(c);
    double res = residual(p);
    for (int it = 0; it < kMaxIterations && !converged(p, res); ++it) {
      CMatrix jac(n * n, d);
      for (Eigen::Index m = 0; m < d; ++m) {
        const CMatrix dm = basis[m] * p + p * basis[m] - basis[m];
        jac.col(m) = Eigen::Map<const CVector>(dm.data(), n * n);
      }
      const CMatrix f = p * p - p;
      const CVector rhs = -Eigen::Map<const CVector>(f.data(), n * n);
      const CVector step = jac.completeOrthogonalDecomposition().solve(rhs);
      double alpha = 1.0;
      bool accepted = false;
      while (alpha > 1e-6) {
        const CVector trial = c + alpha * step;
        const CMatrix pt = assemble(trial);
        const double rt = residual(pt);
        if (rt < res) {
          c = trial;
          p = pt;
          res = rt;
          accepted = true;
          break;
        }
        alpha *= kDamping;
      }
      if (!accepted) break;
    }
    if (!converged(p, res)) continue;
    const double rank = p.trace().real();
    if (rank < 0.5 || rank > static_cast<double>(n) - 0.5) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const CMatrix& q) {
      return (p - q).norm() <= kDedup * std::max(p.norm(), q.norm());
    });
    if (!duplicate) found.push_back(p);
  }
  return found;
}

}  // namespace sidi
