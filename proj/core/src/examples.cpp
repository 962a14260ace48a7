#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "sidi/decomposer.hpp"

namespace sidi {

namespace {

constexpr int kMaxPoints = 100000;

[[noreturn]] void bad_params(const std::string& what) { throw Error(ErrorCode::BadParams, what); }

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad_params("'" + std::string(s) + "' is not a number");
  }
  return v;
}

int count_param(const std::optional<int>& v, int fallback, const char* name) {
  const int n = v.value_or(fallback);
  if (n <= 0 || n > kMaxPoints) {
    bad_params(std::string(name) + " must be in 1.." + std::to_string(kMaxPoints));
  }
  return n;
}

CMatrix upper2(Complex a, Complex b, Complex d) {
  CMatrix m(2, 2);
  m << a, b, 0.0, d;
  return m;
}

// Uniform grid lambda_j = j/m on (0,1], cell weight 1/m.
OperatorField grid_field(int m, const std::function<CMatrix(double)>& fiber) {
  std::vector<SamplePoint> points;
  std::vector<CMatrix> fibers;
  points.reserve(static_cast<std::size_t>(m));
  fibers.reserve(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) {
    const double lambda = static_cast<double>(j) / m;
    points.push_back({shortest(lambda), 1.0 / m, 2});
    fibers.push_back(fiber(lambda));
  }
  return OperatorField(PartitionedSpace(std::move(points)), std::move(fibers));
}

OperatorField indexed_field(int n, int dim, const std::function<CMatrix(int)>& fiber) {
  std::vector<SamplePoint> points;
  std::vector<CMatrix> fibers;
  for (int i = 1; i <= n; ++i) {
    points.push_back({std::to_string(i), 1.0, dim});
    fibers.push_back(fiber(i));
  }
  return OperatorField(PartitionedSpace(std::move(points)), std::move(fibers));
}

OperatorField phi_field(int m, const PhiSpec& phi) {
  return grid_field(m, [&](double l) { return upper2(l, phi(l), l); });
}

}  // namespace

ExampleName parse_example_name(std::string_view s) {
  struct Alias {
    std::string_view name;
    ExampleName value;
  };
  static constexpr Alias kAliases[] = {
      {"ex2.1", ExampleName::Ex21},       {"ex2_1", ExampleName::Ex21},
      {"ex2.2", ExampleName::Ex22},       {"ex2_2", ExampleName::Ex22},
      {"prop4.3", ExampleName::Prop43},   {"prop4_3", ExampleName::Prop43},
      {"lemma4.4", ExampleName::Lemma44}, {"lemma4_4", ExampleName::Lemma44},
      {"lemma4.5", ExampleName::Lemma45}, {"lemma4_5", ExampleName::Lemma45},
      {"normal", ExampleName::Normal},    {"const-j2", ExampleName::ConstJ2},
      {"const_j2", ExampleName::ConstJ2},
  };
  for (const auto& a : kAliases) {
    if (a.name == s) return a.value;
  }
  throw Error(ErrorCode::UnknownExample, "unknown example '" + std::string(s) + "'");
}

std::string_view to_string(ExampleName n) noexcept {
  switch (n) {
    case ExampleName::Ex21:
      return "ex2.1";
    case ExampleName::Ex22:
      return "ex2.2";
    case ExampleName::Prop43:
      return "prop4.3";
    case ExampleName::Lemma44:
      return "lemma4.4";
    case ExampleName::Lemma45:
      return "lemma4.5";
    case ExampleName::Normal:
      return "normal";
    case ExampleName::ConstJ2:
      return "const-j2";
  }
  return "normal";
}

PhiSpec PhiSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) bad_params("phi must look like kind:args");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  PhiSpec out;
  out.text_ = std::string(text);
  if (kind == "const") {
    out.kind_ = Kind::Const;
    out.a_ = parse_number(args);
    return out;
  }
  const auto comma = args.find(',');
  if (comma == std::string_view::npos) bad_params("phi '" + out.text_ + "' needs two arguments");
  out.a_ = parse_number(args.substr(0, comma));
  out.b_ = parse_number(args.substr(comma + 1));
  if (kind == "indicator") {
    out.kind_ = Kind::Indicator;
    if (!(out.a_ < out.b_)) bad_params("indicator interval (a,b] needs a < b");
  } else if (kind == "linear") {
    out.kind_ = Kind::Linear;
  } else {
    bad_params("unknown phi kind '" + std::string(kind) + "'");
  }
  return out;
}

double PhiSpec::operator()(double lambda) const {
  switch (kind_) {
    case Kind::Const:
      return a_;
    case Kind::Indicator:
      return lambda > a_ && lambda <= b_ ? 1.0 : 0.0;
    case Kind::Linear:
      return a_ + b_ * lambda;
  }
  return 0.0;
}

OperatorField build_example(ExampleName name, const ExampleParams& p) {
  const bool takes_phi = name == ExampleName::Prop43 || name == ExampleName::Lemma45;
  if (p.phi && !takes_phi) bad_params(std::string(to_string(name)) + " takes no phi");
  const bool takes_grid = name == ExampleName::Ex22 || name == ExampleName::Prop43 ||
                          name == ExampleName::Lemma44 || name == ExampleName::Lemma45;
  const bool takes_fibers = name == ExampleName::Ex21 || name == ExampleName::ConstJ2;
  const bool takes_samples = name == ExampleName::Normal;
  if (p.grid && !takes_grid) bad_params(std::string(to_string(name)) + " takes no grid");
  if (p.fibers && !takes_fibers) bad_params(std::string(to_string(name)) + " takes no fibers");
  if ((p.sample_count || !p.samples.empty()) && !takes_samples) {
    bad_params(std::string(to_string(name)) + " takes no samples");
  }

  switch (name) {
    case ExampleName::Ex21:
      return indexed_field(count_param(p.fibers, 20, "fibers"), 2, [](int i) {
        return upper2(1.0 / i, 1.0, -1.0 / (2.0 * i));
      });
    case ExampleName::ConstJ2:
      return indexed_field(count_param(p.fibers, 20, "fibers"), 2,
                           [](int) { return upper2(0.0, 1.0, 0.0); });
    case ExampleName::Ex22:
      return grid_field(count_param(p.grid, 100, "grid"),
                        [](double l) { return upper2(l, 1.0, -l / 2.0); });
    case ExampleName::Prop43:
      return phi_field(count_param(p.grid, 100, "grid"),
                       PhiSpec::parse(p.phi.value_or("indicator:0,0.5")));
    case ExampleName::Lemma44:
      return phi_field(count_param(p.grid, 100, "grid"), PhiSpec::parse("const:1"));
    case ExampleName::Lemma45: {
      const PhiSpec phi = PhiSpec::parse(p.phi.value_or("indicator:0,0.5"));
      if (phi.text().rfind("indicator:", 0) != 0) bad_params("lemma4.5 needs an indicator phi");
      return phi_field(count_param(p.grid, 100, "grid"), phi);
    }
    case ExampleName::Normal: {
      std::vector<double> values = p.samples;
      if (values.empty()) {
        const int k = count_param(p.sample_count, 8, "samples");
        for (int j = 1; j <= k; ++j) values.push_back(j);
      } else if (p.sample_count) {
        bad_params("give either sample values or a sample count");
      }
      if (values.size() > static_cast<std::size_t>(kMaxPoints)) bad_params("too many samples");
      return indexed_field(static_cast<int>(values.size()), 1, [&](int i) {
        CMatrix m(1, 1);
        m(0, 0) = values[static_cast<std::size_t>(i - 1)];
        return m;
      });
    }
  }
  throw Error(ErrorCode::UnknownExample, "unknown example");
}

FamilyBuilder family_builder(ExampleName name) {
  switch (name) {
    case ExampleName::Ex21:
    case ExampleName::ConstJ2:
      return [name](int n) {
        ExampleParams p;
        p.fibers = n;
        return build_example(name, p);
      };
    case ExampleName::Ex22:
      return [](int m) {
        ExampleParams p;
        p.grid = m;
        return build_example(ExampleName::Ex22, p);
      };
    case ExampleName::Normal:
      return [](int k) {
        ExampleParams p;
        p.sample_count = k;
        return build_example(ExampleName::Normal, p);
      };
    default:
      throw Error(ErrorCode::UnknownExample,
                  std::string(to_string(name)) + " has no scan parameter");
  }
}

TrendReport scan_family(const FamilyBuilder& builder, std::span<const int> params,
                        const Tolerances& tol) {
  tol.validate();
  TrendReport out;
  for (int p : params) {
    if (p <= 0) throw Error(ErrorCode::InvalidArgument, "scan parameters must be positive");
  }
  std::vector<int> distinct(params.begin(), params.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "scan needs at least two distinct parameters");
  }

  for (int p : params) {
    const OperatorField f = builder(p);
    double norm = 1.0;
    int ill = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const FiberReport r = analyze_fiber(f.fiber(i), tol);
      if (r.ill_conditioned && r.central.empty()) ++ill;
      norm = std::max(norm, r.max_central_norm);
    }
    if (ill > 0) {
      out.notes.push_back("param " + std::to_string(p) + ": " + std::to_string(ill) +
                          " fibers without spectral idempotents");
    }
    out.params.push_back(p);
    out.norms.push_back(norm);
  }

  // Ordinary least squares of log(norm) on log(param).
  const auto n = static_cast<double>(out.params.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < out.params.size(); ++k) {
    mx += std::log(out.params[k]);
    my += std::log(out.norms[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < out.params.size(); ++k) {
    const double dx = std::log(out.params[k]) - mx;
    const double dy = std::log(out.norms[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  const double ss_res = std::max(0.0, syy - out.slope * sxy);
  out.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  out.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  out.divergent = out.slope > kDivergentSlope && out.r_squared > kDivergentRSquared;
  return out;
}

}  // namespace sidi
