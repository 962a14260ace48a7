#pragma once

// Decision procedure for fields of matrices: does the field carry a bounded
// maximal abelian family of idempotents in its commutant, i.e. is it similar
// to a field of strongly irreducible blocks?  Produces a checkable
// certificate either way, plus the example families used throughout the
// tests and the trend scanner for parameterized families.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sidi/field.hpp"
#include "sidi/si_analysis.hpp"

namespace sidi {

inline constexpr std::string_view kToolVersion = "sidi 0.1.0";

enum class Verdict { Decomposable, NotDecomposableWithinBound, Inconclusive };

std::string_view to_string(Verdict v) noexcept;
/// Throws MalformedCertificate on an unknown name.
Verdict verdict_from_string(std::string_view s);
/// 0, 1 and 3 respectively.
int exit_code(Verdict v) noexcept;

struct CentralIdempotent {
  Complex eigenvalue;
  int multiplicity = 0;
  CMatrix projector;
  double norm = 0.0;
};

struct FiberReport {
  std::string label;
  int dim = 0;
  bool si = false;
  bool ill_conditioned = false;
  JordanStructure jordan;
  /// Riesz idempotents, one per eigenvalue cluster ({I} for an SI fiber).
  std::vector<CentralIdempotent> central;
  /// Largest norm over the Boolean algebra the Riesz idempotents generate.
  double max_central_norm = 1.0;
  CMatrix max_central_element;
  std::vector<std::string> notes;
};

/// Never throws on numerical trouble; failures land in `notes` with
/// `ill_conditioned` set.  When only the Jordan analysis fails the central
/// data is still filled in.
FiberReport analyze_fiber(const CMatrix& a, const Tolerances& tol, std::string label = {});

struct Witness {
  std::string label;           ///< point where the bound is exceeded
  double norm = 0.0;
  std::vector<CMatrix> fibers; ///< one central idempotent per point
};

struct Diagnostics {
  double central_bound = 1.0;  ///< max central norm over all points
  std::optional<double> refined_bound;
  bool capped = false;         ///< some algebra bound was not enumerated exhaustively
  std::vector<std::string> ill_conditioned;  ///< labels
  std::vector<std::string> notes;
};

struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  double bound_used = 0.0;
  Tolerances tolerances;
  std::string tool_version{kToolVersion};
  std::vector<std::string> labels;
  /// Per point (in space order), the atoms of the abelian family.
  std::vector<std::vector<CMatrix>> atoms;
  /// Per point, X with X E X^-1 Hermitian for every atom E.
  std::vector<CMatrix> orthogonalizers;
  std::optional<OperatorField> si_field;
  std::optional<Witness> witness;
  Diagnostics diagnostics;
};

/// `bound` defaults to 10 * max(1, field_norm(F)).  Throws InvalidArgument
/// when the bound is below 1.
Certificate decide(const OperatorField& f, std::optional<double> bound, const Tolerances& tol);

struct VerificationReport {
  bool ok = false;
  std::vector<std::string> failures;  ///< "<check>@<label>: detail"
  int checks = 0;
};

/// Recomputes every certificate invariant from the field.  Throws
/// MalformedCertificate when the certificate does not fit the field (labels,
/// counts, dimensions) or lacks a part its verdict requires.
VerificationReport verify_certificate(const OperatorField& f, const Certificate& c,
                                      const Tolerances& tol);

/// Certificate for X F X^-1 from one for F: atoms become X E X^-1 and
/// orthogonalizers O X^-1, the witness is conjugated.  The si_field is
/// carried unchanged since its pieces are similar to the new compressions.
Certificate transport_certificate(const Certificate& c, std::span<const CMatrix> similarities,
                                  double new_bound, const Tolerances& tol);

// Example families -----------------------------------------------------------

enum class ExampleName { Ex21, Ex22, Prop43, Lemma44, Lemma45, Normal, ConstJ2 };

/// Accepts "ex2.1", "ex2_1", ... ; throws UnknownExample.
ExampleName parse_example_name(std::string_view s);
std::string_view to_string(ExampleName n) noexcept;

/// phi(lambda) for the grid families.  Grammar: "const:c", "indicator:a,b"
/// (1 on (a,b], 0 elsewhere), "linear:a,b" (a + b*lambda).
class PhiSpec {
 public:
  /// Throws BadParams.
  static PhiSpec parse(std::string_view text);
  double operator()(double lambda) const;
  const std::string& text() const noexcept { return text_; }

 private:
  enum class Kind { Const, Indicator, Linear };
  Kind kind_ = Kind::Const;
  double a_ = 1.0;
  double b_ = 0.0;
  std::string text_ = "const:1";
};

struct ExampleParams {
  std::optional<int> fibers;           ///< ex2.1, const-j2 (default 20)
  std::optional<int> grid;             ///< ex2.2 and the phi families (default 100)
  std::vector<double> samples;         ///< normal: explicit eigenvalues
  std::optional<int> sample_count;     ///< normal: eigenvalues 1..count (default 8)
  std::optional<std::string> phi;
};

/// Throws UnknownExample / BadParams.
OperatorField build_example(ExampleName name, const ExampleParams& params);

// Divergence scanning ---------------------------------------------------------

using FamilyBuilder = std::function<OperatorField(int)>;

/// Builder indexed by the family's natural size parameter: fiber count for
/// ex2.1 and const-j2, grid size for ex2.2, sample count for normal.
FamilyBuilder family_builder(ExampleName name);

struct TrendReport {
  std::vector<int> params;
  std::vector<double> norms;  ///< max central norm of each field
  double slope = 0.0;         ///< of log(norm) against log(param)
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  bool divergent = false;     ///< slope > 0.5 and r_squared > 0.9
  std::vector<std::string> notes;
};

inline constexpr double kDivergentSlope = 0.5;
inline constexpr double kDivergentRSquared = 0.9;

/// Throws InvalidArgument for fewer than two distinct positive parameters.
TrendReport scan_family(const FamilyBuilder& builder, std::span<const int> params,
                        const Tolerances& tol);

}  // namespace sidi
