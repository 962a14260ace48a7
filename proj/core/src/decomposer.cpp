#include "sidi/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sidi/commutant.hpp"
#include "sidi/idempotent_algebra.hpp"

namespace sidi {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Decomposable:
      return "DECOMPOSABLE";
    case Verdict::NotDecomposableWithinBound:
      return "NOT_DECOMPOSABLE_WITHIN_BOUND";
    case Verdict::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

Verdict verdict_from_string(std::string_view s) {
  for (Verdict v : {Verdict::Decomposable, Verdict::NotDecomposableWithinBound,
                    Verdict::Inconclusive}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::MalformedCertificate, "unknown verdict '" + std::string(s) + "'");
}

int exit_code(Verdict v) noexcept {
  switch (v) {
    case Verdict::Decomposable:
      return 0;
    case Verdict::NotDecomposableWithinBound:
      return 1;
    case Verdict::Inconclusive:
      return 3;
  }
  return 3;
}

FiberReport analyze_fiber(const CMatrix& a, const Tolerances& tol, std::string label) {
  require_valid(a);
  FiberReport r;
  r.label = std::move(label);
  r.dim = static_cast<int>(a.rows());
  r.max_central_element = identity(a.rows());

  std::vector<SpectralIdempotent> riesz;
  try {
    riesz = riesz_decomposition(a, tol);
  } catch (const Error& e) {
    r.ill_conditioned = true;
    r.notes.emplace_back(std::string("spectral idempotents: ") + e.what());
    return r;
  }
  std::vector<CMatrix> projectors;
  for (const auto& s : riesz) {
    r.central.push_back({s.eigenvalue, s.multiplicity, s.projector, op_norm(s.projector)});
    projectors.push_back(s.projector);
  }
  if (projectors.size() > 1) {
    try {
      const AlgebraBound ab =
          algebra_bound(IdempotentAlgebra::from_atoms(std::move(projectors), tol));
      r.max_central_norm = std::max(1.0, ab.value);
      if (ab.value >= 1.0) r.max_central_element = ab.maximizer;
      if (ab.capped) r.notes.emplace_back("central bound scanned atoms and complements only");
    } catch (const Error& e) {
      r.ill_conditioned = true;
      r.notes.emplace_back(std::string("central algebra: ") + e.what());
    }
  }

  try {
    r.jordan = jordan_structure(a, tol);
    r.si = r.jordan.clusters.size() == 1 && r.jordan.block_count() == 1;
  } catch (const Error& e) {
    r.ill_conditioned = true;
    r.notes.emplace_back(std::string("Jordan structure: ") + e.what());
  }
  return r;
}

Certificate decide(const OperatorField& f, std::optional<double> bound, const Tolerances& tol) {
  tol.validate();
  const double b = bound.value_or(10.0 * std::max(1.0, field_norm(f)));
  if (!std::isfinite(b) || b < 1.0) {
    throw Error(ErrorCode::InvalidArgument, "bound must be a finite number >= 1");
  }

  Certificate c;
  c.bound_used = b;
  c.tolerances = tol;
  c.labels = f.space().labels();

  std::vector<FiberReport> reports;
  reports.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    reports.push_back(analyze_fiber(f.fiber(i), tol, f.space().point(i).label));
  }
  auto& diag = c.diagnostics;
  for (const auto& r : reports) {
    diag.central_bound = std::max(diag.central_bound, r.max_central_norm);
    if (r.ill_conditioned) {
      diag.ill_conditioned.push_back(r.label);
      for (const auto& n : r.notes) diag.notes.push_back(r.label + ": " + n);
    }
  }

  // Central idempotents belong to every maximal abelian family, so one of
  // norm > B rules out any family bounded by B.
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].max_central_norm <= b) continue;
    Witness w;
    w.label = reports[i].label;
    for (std::size_t k = 0; k < f.size(); ++k) {
      w.fibers.push_back(k == i ? reports[i].max_central_element
                                : identity(f.space().point(k).dim));
    }
    w.norm = op_norm(w.fibers[i]);
    c.witness = std::move(w);
    c.verdict = Verdict::NotDecomposableWithinBound;
    diag.notes.push_back("central idempotent at '" + reports[i].label + "' has norm " +
                         std::to_string(reports[i].max_central_norm) + " > bound");
    return c;
  }

  if (!diag.ill_conditioned.empty()) {
    c.verdict = Verdict::Inconclusive;
    return c;
  }

  std::vector<FiberSplit> splits;
  double refined = 1.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const CMatrix& a = f.fiber(i);
    const auto& label = reports[i].label;
    std::vector<CMatrix> atoms;
    try {
      if (reports[i].si) {
        atoms.push_back(identity(a.rows()));
      } else {
        const SISplit s = si_split(a, tol);
        FiberSplit split{i, {}, s.similarity};
        Eigen::Index offset = 0;
        for (const auto& blk : s.blocks) {
          const Eigen::Index d = blk.rows();
          atoms.push_back(s.basis.middleCols(offset, d) * s.similarity.middleRows(offset, d));
          split.block_dims.push_back(static_cast<int>(d));
          offset += d;
        }
        splits.push_back(std::move(split));
      }
      const IdempotentAlgebra alg = IdempotentAlgebra::from_atoms(atoms, tol);
      const AlgebraBound ab = algebra_bound(alg);
      refined = std::max(refined, ab.value);
      diag.capped = diag.capped || ab.capped;
      c.orthogonalizers.push_back(orthogonalize(alg, tol));
    } catch (const Error& e) {
      diag.ill_conditioned.push_back(label);
      diag.notes.push_back(label + ": refinement failed: " + e.what());
    }
    c.atoms.push_back(std::move(atoms));
  }
  diag.refined_bound = refined;

  auto inconclusive = [&](std::string note) {
    c.verdict = Verdict::Inconclusive;
    c.atoms.clear();
    c.orthogonalizers.clear();
    diag.notes.push_back(std::move(note));
    return c;
  };
  if (!diag.ill_conditioned.empty()) return inconclusive("refinement failed at some points");
  if (refined > b) {
    return inconclusive("Jordan-basis refinement has bound " + std::to_string(refined) +
                        " > bound; central bound " + std::to_string(diag.central_bound) +
                        " does not refute a smaller family");
  }
  try {
    c.si_field = repartition(f, splits, tol);
  } catch (const Error& e) {
    return inconclusive(std::string("repartition failed: ") + e.what());
  }
  c.verdict = Verdict::Decomposable;
  return c;
}

namespace {

struct Checker {
  VerificationReport& report;
  void operator()(bool pass, const std::string& check, const std::string& label,
                  const std::string& detail = {}) {
    ++report.checks;
    if (!pass) {
      report.failures.push_back(check + "@" + label + (detail.empty() ? "" : ": " + detail));
    }
  }
};

void malformed(const std::string& what) { throw Error(ErrorCode::MalformedCertificate, what); }

bool commutes(const CMatrix& x, const CMatrix& a, const Tolerances& tol) {
  return op_norm(x * a - a * x) <= tol.check() * std::max(1.0, op_norm(x) * op_norm(a));
}

// Pieces of the si_field belonging to point `label`, in order.
std::vector<std::size_t> pieces_of(const OperatorField& si, const std::string& label) {
  std::vector<std::size_t> out;
  if (auto whole = si.space().index_of(label)) {
    out.push_back(*whole);
    return out;
  }
  for (std::size_t k = 0;; ++k) {
    auto idx = si.space().index_of(piece_label(label, k));
    if (!idx) break;
    out.push_back(*idx);
  }
  return out;
}

void verify_decomposable(const OperatorField& f, const Certificate& c, const Tolerances& tol,
                         Checker& check) {
  const std::size_t n = f.size();
  if (c.atoms.size() != n || c.orthogonalizers.size() != n || !c.si_field) {
    malformed("decomposable certificate needs atoms, orthogonalizers and si_field for every point");
  }
  std::size_t pieces_seen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const CMatrix& a = f.fiber(i);
    const auto& label = c.labels[i];
    const auto& atoms = c.atoms[i];
    const CMatrix& o = c.orthogonalizers[i];
    if (atoms.empty()) malformed("no atoms at '" + label + "'");
    for (const auto& e : atoms) {
      if (e.rows() != a.rows() || e.cols() != a.cols()) malformed("atom size mismatch at '" + label + "'");
    }
    if (o.rows() != a.rows() || o.cols() != a.cols()) {
      malformed("orthogonalizer size mismatch at '" + label + "'");
    }

    std::optional<IdempotentAlgebra> alg;
    try {
      alg = IdempotentAlgebra::from_atoms(atoms, tol);
      check(true, "atoms", label);
    } catch (const Error& e) {
      check(false, "atoms", label, e.what());
    }
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      check(commutes(atoms[k], a, tol), "commutes", label, "atom " + std::to_string(k));
    }
    if (!alg) continue;

    const AlgebraBound ab = algebra_bound(*alg);
    check(ab.value <= c.bound_used * (1.0 + tol.check()), "bound", label,
          std::to_string(ab.value) + " > " + std::to_string(c.bound_used));
    try {
      const MaximalityReport m = is_maximal_in_commutant(a, *alg, tol);
      std::string detail;
      for (const auto& note : m.notes) detail += (detail.empty() ? "" : "; ") + note;
      check(m.maximal, "maximal", label, detail);
    } catch (const Error& e) {
      check(false, "maximal", label, e.what());
    }
    try {
      const CMatrix oinv = inverse(o, tol);
      const double cond = condition_number(o);
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const CMatrix y = o * atoms[k] * oinv;
        const double asym = op_norm(y - y.adjoint());
        check(asym <= tol.check() * cond * std::max(1.0, op_norm(y)), "hermitian", label,
              "atom " + std::to_string(k) + " asymmetry " + std::to_string(asym));
      }
    } catch (const Error& e) {
      check(false, "hermitian", label, e.what());
    }

    const auto pieces = pieces_of(*c.si_field, label);
    pieces_seen += pieces.size();
    if (pieces.size() != atoms.size()) {
      check(false, "si_field", label,
            std::to_string(pieces.size()) + " pieces for " + std::to_string(atoms.size()) + " atoms");
      continue;
    }
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const CMatrix& piece = c.si_field->fiber(pieces[k]);
      const auto& piece_name = c.si_field->space().point(pieces[k]).label;
      try {
        check(is_strongly_irreducible(piece, tol), "si", piece_name);
      } catch (const Error& e) {
        check(false, "si", piece_name, e.what());
      }
      const CMatrix& e = atoms[k];
      const double rank = e.trace().real();
      if (std::abs(rank - static_cast<double>(piece.rows())) > 0.25) {
        check(false, "si_field", piece_name, "dimension does not match atom rank");
        continue;
      }
      const Complex expected = (a * e).trace() / rank;
      const Complex got = piece.trace() / static_cast<double>(piece.rows());
      const double limit = tol.check() * std::max(1.0, op_norm(a)) *
                           std::max(1.0, op_norm(e)) * static_cast<double>(a.rows());
      check(std::abs(expected - got) <= limit, "si_field", piece_name,
            "eigenvalue does not match the atom's compression");
    }
  }
  if (pieces_seen != c.si_field->size()) {
    check(false, "si_field", "*", "points not attributable to any field label");
  }
}

void verify_refusal(const OperatorField& f, const Certificate& c, const Tolerances& tol,
                    Checker& check) {
  if (!c.witness) malformed("refusal certificate has no witness");
  const Witness& w = *c.witness;
  if (w.fibers.size() != f.size()) malformed("witness does not cover every point");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (w.fibers[i].rows() != f.fiber(i).rows() || w.fibers[i].cols() != f.fiber(i).cols()) {
      malformed("witness size mismatch at '" + c.labels[i] + "'");
    }
  }
  if (!f.space().index_of(w.label)) malformed("witness label '" + w.label + "' not in field");

  double sup = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const CMatrix& a = f.fiber(i);
    const CMatrix& p = w.fibers[i];
    const auto& label = c.labels[i];
    sup = std::max(sup, op_norm(p));
    check(is_idempotent(p, tol), "idempotent", label);
    check(commutes(p, a, tol), "commutes", label);
    const bool trivial = op_norm(p - identity(p.rows())) <= tol.check() || op_norm(p) <= tol.check();
    if (trivial) continue;
    try {
      const CommutantBasis basis = commutant_basis(a, tol);
      bool central = true;
      for (const auto& bm : basis.elements) central = central && commutes(p, bm, tol);
      check(central, "central", label);
    } catch (const Error& e) {
      check(false, "central", label, e.what());
    }
  }
  check(sup > c.bound_used, "bound", w.label,
        std::to_string(sup) + " does not exceed " + std::to_string(c.bound_used));
  check(std::abs(sup - w.norm) <= tol.check() * std::max(1.0, sup), "norm", w.label,
        "stated " + std::to_string(w.norm) + ", computed " + std::to_string(sup));
}

}  // namespace

VerificationReport verify_certificate(const OperatorField& f, const Certificate& c,
                                      const Tolerances& tol) {
  if (c.labels != f.space().labels()) {
    throw Error(ErrorCode::MalformedCertificate, "certificate labels do not match the field");
  }
  if (!(c.bound_used >= 1.0) || !std::isfinite(c.bound_used)) {
    throw Error(ErrorCode::MalformedCertificate, "bound_used must be a finite number >= 1");
  }
  VerificationReport report;
  Checker check{report};
  switch (c.verdict) {
    case Verdict::Decomposable:
      verify_decomposable(f, c, tol, check);
      break;
    case Verdict::NotDecomposableWithinBound:
      verify_refusal(f, c, tol, check);
      break;
    case Verdict::Inconclusive:
      break;
  }
  report.ok = report.failures.empty();
  return report;
}

Certificate transport_certificate(const Certificate& c, std::span<const CMatrix> similarities,
                                  double new_bound, const Tolerances& tol) {
  if (similarities.size() != c.labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "one similarity per point is required");
  }
  Certificate out = c;
  out.bound_used = new_bound;
  out.tolerances = tol;
  std::vector<CMatrix> inverses;
  inverses.reserve(similarities.size());
  for (const auto& x : similarities) inverses.push_back(inverse(x, tol));

  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    for (auto& e : out.atoms[i]) e = similarities[i] * e * inverses[i];
  }
  for (std::size_t i = 0; i < out.orthogonalizers.size(); ++i) {
    out.orthogonalizers[i] = out.orthogonalizers[i] * inverses[i];
  }
  if (out.witness) {
    auto& w = *out.witness;
    double sup = 0.0;
    for (std::size_t i = 0; i < w.fibers.size(); ++i) {
      w.fibers[i] = similarities[i] * w.fibers[i] * inverses[i];
      const double v = op_norm(w.fibers[i]);
      if (v > sup) {
        sup = v;
        w.label = c.labels[i];
      }
    }
    w.norm = sup;
  }
  out.diagnostics.refined_bound.reset();
  out.diagnostics.notes.push_back("transported by a pointwise similarity");
  return out;
}

}  // namespace sidi
