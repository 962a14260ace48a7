#include "sidi/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sidi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::IllConditioned: return "ILL_CONDITIONED";
    case ErrorCode::NotPositiveDefinite: return "NOT_PD";
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::NotCommuting: return "NOT_COMMUTING";
    case ErrorCode::NotIdempotent: return "NOT_IDEMPOTENT";
    case ErrorCode::NotInCommutant: return "NOT_IN_COMMUTANT";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::NotBlockDiagonalizable: return "NOT_BLOCK_DIAGONALIZABLE";
    case ErrorCode::UnknownExample: return "UNKNOWN_EXAMPLE";
    case ErrorCode::BadParams: return "BAD_PARAMS";
    case ErrorCode::MalformedCertificate: return "MALFORMED_CERTIFICATE";
    case ErrorCode::MalformedInput: return "MALFORMED_INPUT";
  }
  return "UNKNOWN";
}

void Tolerances::validate() const {
  if (!(tol_zero > 0.0) || !(tol_cluster > 0.0) || !(max_cond > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must be strictly positive");
  }
  if (tol_zero > tol_cluster) {
    throw Error(ErrorCode::InvalidArgument, "tol_zero must not exceed tol_cluster");
  }
}

bool is_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

void require_valid(const CMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix must be square and non-empty, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
  if (!is_finite(m)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
}

namespace {

// One-sided Jacobi throughout: Eigen 3.4.0's divide-and-conquer BDCSVD can
// return a wrong leading singular value for block-diagonal input.
Eigen::VectorXd singular_values(const CMatrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

// Above this size op_norm uses the Gram matrix, whose largest eigenvalue
// carries the largest singular value to full relative accuracy.
constexpr Eigen::Index kGramNormSize = 48;

}  // namespace

double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= kGramNormSize) return singular_values(m)(0);
  const CMatrix gram = m.rows() >= m.cols() ? CMatrix(m.adjoint() * m) : CMatrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double condition_number(const CMatrix& m) {
  const Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix nullspace_abs(const CMatrix& l, double threshold) {
  const Eigen::Index n = l.cols();
  if (l.rows() == 0) return identity(n);
  const Eigen::JacobiSVD<CMatrix> svd(l, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const CMatrix& v = svd.matrixV();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return v.rightCols(n - rank);
}

CMatrix nullspace(const CMatrix& l, const Tolerances& tol) {
  return nullspace_abs(l, tol.tol_zero * op_norm(l));
}

int numerical_rank(const CMatrix& m, double threshold) {
  const Eigen::VectorXd s = singular_values(m);
  int rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return rank;
}

CMatrix orth(const CMatrix& m, double threshold) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixU().leftCols(rank);
}

CMatrix pd_sqrt(const CMatrix& s, const Tolerances& tol) {
  require_valid(s);
  const double norm = op_norm(s);
  if (op_norm(s - s.adjoint()) > tol.tol_zero * norm) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not Hermitian");
  }
  const CMatrix h = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXd& w = es.eigenvalues();
  if (!(w(0) > tol.tol_zero * norm)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(w(0)) + " is not positive");
  }
  const CMatrix& v = es.eigenvectors();
  return v * w.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
}

CMatrix inverse(const CMatrix& m, const Tolerances& tol) {
  require_valid(m);
  const Eigen::VectorXd s = singular_values(m);
  const double smin = s(s.size() - 1);
  if (!(smin > s(0) / tol.max_cond)) {
    throw Error(ErrorCode::Singular, "condition number exceeds max_cond");
  }
  return m.partialPivLu().inverse();
}

SchurForm schur(const CMatrix& a) {
  require_valid(a);
  if (a.rows() == 1) return {identity(1), a};
  Eigen::ComplexSchur<CMatrix> cs(a, true);
  if (cs.info() != Eigen::Success) {
    throw Error(ErrorCode::IllConditioned, "Schur iteration did not converge");
  }
  SchurForm form{cs.matrixU(), cs.matrixT()};
  form.t.triangularView<Eigen::StrictlyLower>().setZero();
  return form;
}

namespace {

// Exchanges diagonal entries k and k+1 of the triangular factor with a
// unitary rotation whose first column spans the eigenvector for T(k+1,k+1).
void swap_adjacent(SchurForm& form, Eigen::Index k) {
  CMatrix& t = form.t;
  const Complex a = t(k, k);
  const Complex b = t(k + 1, k + 1);
  const Complex c = t(k, k + 1);
  Eigen::Matrix2cd g;
  const double r = std::hypot(std::abs(c), std::abs(b - a));
  if (r == 0.0) {
    g << 0.0, 1.0, 1.0, 0.0;
  } else {
    const Complex u = c / r;
    const Complex v = (b - a) / r;
    g << u, -std::conj(v), v, std::conj(u);
  }
  t.middleRows(k, 2) = (g.adjoint() * t.middleRows(k, 2)).eval();
  t.middleCols(k, 2) = (t.middleCols(k, 2) * g).eval();
  form.q.middleCols(k, 2) = (form.q.middleCols(k, 2) * g).eval();
  t(k + 1, k) = 0.0;
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

}  // namespace

void reorder_schur(SchurForm& form, std::vector<bool>& selected) {
  const auto n = static_cast<Eigen::Index>(selected.size());
  if (n != form.t.rows()) throw Error(ErrorCode::InvalidArgument, "selection size mismatch");
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (!selected[k] && selected[k + 1]) {
        swap_adjacent(form, k);
        std::swap(selected[k], selected[k + 1]);
        swapped = true;
      }
    }
  }
}

CMatrix solve_triangular_sylvester(const CMatrix& t11, const CMatrix& t22, const CMatrix& c) {
  const Eigen::Index p = t11.rows();
  const Eigen::Index q = t22.rows();
  CMatrix y(p, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    CVector rhs = c.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs += y.col(i) * t22(i, j);
    CMatrix shifted = t11;
    shifted.diagonal().array() -= t22(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

CMatrix direct_sum(std::span<const CMatrix> blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.rows();
  CMatrix out = CMatrix::Zero(total, total);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

Staircase nilpotent_staircase(const CMatrix& n, double threshold) {
  const Eigen::Index m = n.rows();
  Staircase out;
  out.basis = CMatrix(m, 0);
  out.margin = std::numeric_limits<double>::infinity();
  if (m == 0) {
    out.complete = true;
    return out;
  }
  CMatrix kernel(m, 0);
  while (kernel.cols() < m) {
    // Orthonormal complement of the current kernel.
    CMatrix complement;
    if (kernel.cols() == 0) {
      complement = identity(m);
    } else {
      Eigen::HouseholderQR<CMatrix> qr(kernel);
      const CMatrix full = qr.householderQ() * identity(m);
      complement = full.rightCols(m - kernel.cols());
    }
    const CMatrix compressed = complement.adjoint() * n * complement;
    Eigen::JacobiSVD<CMatrix> svd(compressed, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > threshold) ++rank;
    if (rank > 0 && threshold > 0.0) {
      out.margin = std::min(out.margin, s(rank - 1) / threshold);
    }
    const Eigen::Index fresh = compressed.cols() - rank;
    if (fresh == 0) break;
    const CMatrix directions = complement * svd.matrixV().rightCols(fresh);
    CMatrix grown(m, kernel.cols() + fresh);
    grown << kernel, directions;
    kernel = std::move(grown);
    out.kernel_dims.push_back(static_cast<int>(kernel.cols()));
  }
  out.basis = kernel;
  out.complete = kernel.cols() == m;
  return out;
}

namespace {

struct DendrogramNode {
  std::vector<int> members;
  double height = 0.0;
  int left = -1;
  int right = -1;
};

// Single-linkage dendrogram by Kruskal merging.  Returns nodes with the root last.
std::vector<DendrogramNode> single_linkage(std::span<const Complex> values) {
  const int n = static_cast<int>(values.size());
  std::vector<DendrogramNode> nodes;
  nodes.reserve(2 * n);
  for (int i = 0; i < n; ++i) nodes.push_back({{i}, 0.0, -1, -1});

  struct Edge {
    double d;
    int i;
    int j;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({std::abs(values[i] - values[j]), i, j});
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& x, const Edge& y) { return x.d < y.d; });

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) {
    const int ri = find(e.i);
    const int rj = find(e.j);
    if (ri == rj) continue;
    DendrogramNode merged;
    merged.left = node_of[ri];
    merged.right = node_of[rj];
    merged.height = e.d;
    merged.members = nodes[merged.left].members;
    merged.members.insert(merged.members.end(), nodes[merged.right].members.begin(),
                          nodes[merged.right].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    nodes.push_back(std::move(merged));
    parent[rj] = ri;
    node_of[ri] = static_cast<int>(nodes.size()) - 1;
  }
  return nodes;
}

// True when the Schur block of `members`, minus their mean eigenvalue, is
// numerically nilpotent.
bool block_is_scalar_plus_nilpotent(const SchurForm& form, const std::vector<int>& members,
                                    double threshold) {
  SchurForm work = form;
  std::vector<bool> selected(form.t.rows(), false);
  for (int i : members) selected[i] = true;
  reorder_schur(work, selected);
  const auto m = static_cast<Eigen::Index>(members.size());
  CMatrix block = work.t.topLeftCorner(m, m);
  const Complex mean = block.trace() / static_cast<double>(m);
  block.diagonal().array() -= mean;
  return nilpotent_staircase(block, threshold).complete;
}

}  // namespace

ClusteredSchur clustered_schur(const CMatrix& a, const Tolerances& tol) {
  tol.validate();
  ClusteredSchur out;
  out.form = schur(a);
  out.scale = op_norm(a);
  const Eigen::Index n = a.rows();
  std::vector<Complex> values(n);
  for (Eigen::Index i = 0; i < n; ++i) values[i] = out.form.t(i, i);

  const auto nodes = single_linkage(values);
  const double radius = tol.tol_cluster * out.scale;
  const double nil_threshold = tol.tol_zero * out.scale;

  std::vector<std::vector<int>> groups;
  std::vector<int> stack{static_cast<int>(nodes.size()) - 1};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const auto& node = nodes[id];
    if (node.left < 0 || node.height <= radius ||
        block_is_scalar_plus_nilpotent(out.form, node.members, nil_threshold)) {
      groups.push_back(node.members);
      continue;
    }
    if (node.height <= 2.0 * radius) {
      throw Error(ErrorCode::IllConditioned,
                  "eigenvalue clusters at distance " + std::to_string(node.height) +
                      " are within a factor 2 of the clustering radius " +
                      std::to_string(radius));
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }

  struct Summary {
    Complex mean;
    std::vector<int> members;
  };
  std::vector<Summary> summaries;
  for (auto& g : groups) {
    Complex sum = 0.0;
    for (int i : g) sum += values[i];
    summaries.push_back({sum / static_cast<double>(g.size()), std::move(g)});
  }
  std::stable_sort(summaries.begin(), summaries.end(), [](const Summary& x, const Summary& y) {
    if (x.mean.real() != y.mean.real()) return x.mean.real() < y.mean.real();
    return x.mean.imag() < y.mean.imag();
  });
  out.labels.assign(n, -1);
  for (std::size_t k = 0; k < summaries.size(); ++k) {
    out.clusters.push_back({summaries[k].mean, static_cast<int>(summaries[k].members.size())});
    for (int i : summaries[k].members) out.labels[i] = static_cast<int>(k);
  }
  return out;
}

std::vector<EigenCluster> eig(const CMatrix& m, const Tolerances& tol) {
  return clustered_schur(m, tol).clusters;
}

}  // namespace sidi
