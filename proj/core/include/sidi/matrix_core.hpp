#pragma once

// Dense complex kernels shared by every module: norms, clustered spectra,
// SVD-thresholded nullspaces, positive-definite square roots, inverses,
// and the reordered Schur / triangular Sylvester machinery behind the
// spectral idempotents.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sidi/error.hpp"

namespace sidi {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Tolerances {
  double tol_zero = 1e-10;     ///< residuals below tol_zero * norm count as zero
  double tol_cluster = 1e-8;   ///< base eigenvalue clustering radius, relative to norm
  double max_cond = 1e12;      ///< condition cap before an inverse is refused

  /// Throws InvalidArgument unless all are positive and tol_zero <= tol_cluster.
  void validate() const;

  /// Relative tolerance for structural checks on computed objects
  /// (idempotency, commutation, Hermitian-ness): 100 * tol_zero.
  double check() const noexcept { return 100.0 * tol_zero; }
};

/// Throws InvalidArgument if M is empty, not square, or has non-finite entries.
void require_valid(const CMatrix& m);

bool is_finite(const CMatrix& m);

/// Largest singular value.
double op_norm(const CMatrix& m);

/// Ratio of extreme singular values (infinity when singular).
double condition_number(const CMatrix& m);

CMatrix identity(Eigen::Index dim);

struct EigenCluster {
  Complex value;                 ///< mean of the member eigenvalues
  int multiplicity = 0;
};

/// Nested kernels of a (numerically) nilpotent matrix N:
/// K_1 = ker N, K_{j+1} = {v : Nv in K_j}.  `basis` holds orthonormal columns,
/// the first kernel_dims[0] spanning K_1, the first kernel_dims[1] spanning K_2,
/// and so on.  `complete` is false when the sequence stalls before reaching
/// the full space, i.e. N is not nilpotent at this threshold.
struct Staircase {
  std::vector<int> kernel_dims;
  CMatrix basis;
  bool complete = false;
  /// Smallest ratio sigma/threshold over singular values that were judged
  /// nonzero (infinity if none); values near 1 mean a marginal rank decision.
  double margin = 0.0;
};

Staircase nilpotent_staircase(const CMatrix& n, double threshold);

/// Complex Schur form A = Q T Q^H with T upper triangular.
struct SchurForm {
  CMatrix q;
  CMatrix t;
};

/// Schur form together with a clustering of its diagonal.
struct ClusteredSchur {
  SchurForm form;
  std::vector<int> labels;            ///< cluster of each diagonal entry of T
  std::vector<EigenCluster> clusters; ///< sorted by (real, imag) of the mean
  double scale = 0.0;                 ///< op_norm(A)
};

/// Eigenvalue clustering on a single-linkage dendrogram, cut top-down.
///
/// A dendrogram node is kept as one cluster when its linkage height is at most
/// tol_cluster * ||A||, or when the Schur block of its members, shifted by their
/// mean, is numerically nilpotent (staircase at tol_zero * ||A||).  The second
/// rule keeps defective eigenvalues together even though rounding splits them
/// by roughly eps^(1/m).  Cutting a node whose height is within a factor two of
/// tol_cluster * ||A|| throws IllConditioned.
ClusteredSchur clustered_schur(const CMatrix& a, const Tolerances& tol);

/// Eigenvalues of M grouped into clusters (see clustered_schur).
std::vector<EigenCluster> eig(const CMatrix& m, const Tolerances& tol);

/// Orthonormal basis (as columns) of {v : ||Lv|| <= tol_zero * ||L||}.
/// L may be rectangular.  An empty (n x 0) matrix means the kernel is trivial.
CMatrix nullspace(const CMatrix& l, const Tolerances& tol);

/// Same as nullspace, but with an explicit absolute threshold on singular values.
CMatrix nullspace_abs(const CMatrix& l, double threshold);

/// Numerical rank: number of singular values above threshold.
int numerical_rank(const CMatrix& m, double threshold);

/// Orthonormal basis of the column span of M, rank decided at threshold.
CMatrix orth(const CMatrix& m, double threshold);

/// Positive-definite square root of a Hermitian positive-definite matrix.
CMatrix pd_sqrt(const CMatrix& s, const Tolerances& tol);

/// Inverse, refused (Singular) when sigma_min <= ||M|| / max_cond.
CMatrix inverse(const CMatrix& m, const Tolerances& tol);

SchurForm schur(const CMatrix& a);

/// Reorders a Schur form in place so that the diagonal entries whose flag is
/// set come first, preserving relative order inside both groups.
/// `selected` is permuted along with the diagonal.
void reorder_schur(SchurForm& form, std::vector<bool>& selected);

/// Solves T11 Y - Y T22 = C for upper-triangular T11, T22 with disjoint spectra.
CMatrix solve_triangular_sylvester(const CMatrix& t11, const CMatrix& t22, const CMatrix& c);

/// Block-diagonal direct sum of square blocks.
CMatrix direct_sum(std::span<const CMatrix> blocks);

}  // namespace sidi
