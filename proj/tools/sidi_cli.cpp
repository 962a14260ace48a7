// sidi: command-line front end for building example fields, deciding
// decomposability, verifying certificates and scanning families.
//
// Exit codes: analyze returns 0 / 1 / 3 for DECOMPOSABLE /
// NOT_DECOMPOSABLE_WITHIN_BOUND / INCONCLUSIVE; verify returns 0 when every
// check passes and 1 otherwise; any malformed input or bad argument gives 2.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sidi/certificate_io.hpp"
#include "sidi/decomposer.hpp"
#include "sidi/field_io.hpp"
#include "sidi/si_analysis.hpp"

namespace {

constexpr int kExitUsage = 2;

struct RunConfig {
  sidi::Tolerances tol;
  std::optional<double> bound;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Writes to --out atomically, or to stdout when no path was given.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::filesystem::path target(cfg.out);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw sidi::Error(sidi::ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    f << text;
    if (!f) throw sidi::Error(sidi::ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string certificate_summary(const sidi::Certificate& c) {
  std::ostringstream s;
  s << "verdict: " << sidi::to_string(c.verdict) << "\n";
  s << "bound_used: " << num(c.bound_used) << "\n";
  s << "points: " << c.labels.size() << "\n";
  s << "central_bound: " << num(c.diagnostics.central_bound) << "\n";
  if (c.diagnostics.refined_bound) {
    s << "refined_bound: " << num(*c.diagnostics.refined_bound) << "\n";
  }
  if (c.witness) {
    s << "witness: " << c.witness->label << " norm " << num(c.witness->norm) << "\n";
  }
  if (c.si_field) s << "si_field points: " << c.si_field->size() << "\n";
  for (const auto& l : c.diagnostics.ill_conditioned) s << "ill-conditioned: " << l << "\n";
  for (const auto& n : c.diagnostics.notes) s << "note: " << n << "\n";
  return s.str();
}

std::string trend_summary(const sidi::TrendReport& r, bool json) {
  std::ostringstream s;
  if (json) {
    s << "{\n  \"params\": [";
    for (std::size_t k = 0; k < r.params.size(); ++k) s << (k ? ", " : "") << r.params[k];
    s << "],\n  \"norms\": [";
    for (std::size_t k = 0; k < r.norms.size(); ++k) s << (k ? ", " : "") << num(r.norms[k]);
    s << "],\n  \"slope\": " << num(r.slope) << ",\n  \"intercept\": " << num(r.intercept)
      << ",\n  \"r_squared\": " << num(r.r_squared)
      << ",\n  \"slope_stderr\": " << num(r.slope_stderr) << ",\n  \"verdict\": \""
      << (r.divergent ? "DIVERGENT" : "BOUNDED") << "\"\n}\n";
    return s.str();
  }
  s << "param\tmax_central_norm\n";
  for (std::size_t k = 0; k < r.params.size(); ++k) {
    s << r.params[k] << "\t" << num(r.norms[k]) << "\n";
  }
  s << "slope: " << num(r.slope) << " +/- " << num(r.slope_stderr) << "\n";
  s << "r_squared: " << num(r.r_squared) << "\n";
  s << "verdict: " << (r.divergent ? "DIVERGENT" : "BOUNDED") << "\n";
  for (const auto& n : r.notes) s << "note: " << n << "\n";
  return s.str();
}

std::string fiber_summary(const std::vector<sidi::FiberReport>& reports) {
  std::ostringstream s;
  for (const auto& r : reports) {
    s << r.label << ": dim " << r.dim << (r.si ? ", SI" : ", not SI")
      << ", max central norm " << num(r.max_central_norm);
    if (!r.jordan.clusters.empty()) {
      s << ", blocks";
      for (const auto& c : r.jordan.clusters) {
        s << " " << num(c.eigenvalue.real());
        if (c.eigenvalue.imag() != 0.0) s << (c.eigenvalue.imag() > 0 ? "+" : "") << num(c.eigenvalue.imag()) << "i";
        s << ":";
        for (std::size_t k = 0; k < c.block_sizes.size(); ++k) {
          s << (k ? "," : "") << c.block_sizes[k];
        }
      }
    }
    s << "\n";
    for (const auto& n : r.notes) s << "  note: " << n << "\n";
  }
  return s.str();
}

std::vector<int> parse_range(const std::string& range, const std::string& list) {
  auto parse_int = [](std::string_view t) {
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
      throw sidi::Error(sidi::ErrorCode::BadParams, "'" + std::string(t) + "' is not an integer");
    }
    return v;
  };
  std::vector<int> out;
  if (!range.empty() && !list.empty()) {
    throw sidi::Error(sidi::ErrorCode::BadParams, "give either --range or --params");
  }
  if (!range.empty()) {
    const auto colon = range.find(':');
    if (colon == std::string::npos) {
      throw sidi::Error(sidi::ErrorCode::BadParams, "range must look like a:b");
    }
    const int a = parse_int(std::string_view(range).substr(0, colon));
    const int b = parse_int(std::string_view(range).substr(colon + 1));
    if (a < 1 || b <= a || b - a > 100000) {
      throw sidi::Error(sidi::ErrorCode::BadParams, "range needs 1 <= a < b");
    }
    for (int v = a; v <= b; ++v) out.push_back(v);
  } else if (!list.empty()) {
    std::string_view rest(list);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(parse_int(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    for (int v : out) {
      if (v < 1) throw sidi::Error(sidi::ErrorCode::BadParams, "parameters must be positive");
    }
  } else {
    throw sidi::Error(sidi::ErrorCode::BadParams, "scan needs --range or --params");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decomposability of matrix fields into strongly irreducible blocks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(sidi::kToolVersion));

  RunConfig cfg;
  app.add_option("--tol-zero", cfg.tol.tol_zero, "Relative threshold for numerical zero")
      ->envname("SIDI_TOL_ZERO");
  app.add_option("--tol-cluster", cfg.tol.tol_cluster, "Relative eigenvalue clustering radius")
      ->envname("SIDI_TOL_CLUSTER");
  app.add_option("--bound", cfg.bound, "Bound B on the idempotent family (default 10*max(1,|F|))")
      ->envname("SIDI_BOUND");
  app.add_option("--seed", cfg.seed, "Seed for randomized searches")->envname("SIDI_SEED");
  app.add_option("--out", cfg.out, "Output path (default: stdout)");
  app.add_option("--format", cfg.format, "json or text")
      ->envname("SIDI_FORMAT")
      ->check(CLI::IsMember({"json", "text"}));

  // make
  auto* make = app.add_subcommand("make", "Write an example field");
  std::string make_name;
  sidi::ExampleParams make_params;
  std::optional<std::string> make_samples;
  make->add_option("--name", make_name, "Example family")->required();
  make->add_option("--fibers", make_params.fibers, "Number of fibers (ex2.1, const-j2)");
  make->add_option("--grid", make_params.grid, "Grid size m for (0,1]");
  make->add_option("--samples", make_samples, "Sample count, or comma-separated values (normal)");
  make->add_option("--phi", make_params.phi, "const:c | indicator:a,b | linear:a,b");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Decide and write a certificate");
  std::string analyze_field;
  analyze->add_option("field", analyze_field, "Field file")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "Re-check a certificate against a field");
  std::string verify_field, verify_cert;
  verify->add_option("field", verify_field, "Field file")->required();
  verify->add_option("certificate", verify_cert, "Certificate file")->required();

  // scan
  auto* scan = app.add_subcommand("scan", "Fit central-idempotent norm growth over a family");
  std::string scan_name, scan_range, scan_list, scan_csv;
  scan->add_option("--name", scan_name, "Family (ex2.1, ex2.2, const-j2, normal)")->required();
  scan->add_option("--range", scan_range, "Inclusive integer range a:b");
  scan->add_option("--params", scan_list, "Comma-separated parameters");
  scan->add_option("--csv", scan_csv, "Also write param,norm CSV here");

  // fiber-report
  auto* report = app.add_subcommand("fiber-report", "Per-fiber spectral and Jordan analysis");
  std::string report_field, report_label;
  int brute_trials = 0;
  report->add_option("field", report_field, "Field file")->required();
  report->add_option("--label", report_label, "Only this point");
  report->add_option("--brute-trials", brute_trials,
                     "Also search the commutant for idempotents (dim <= 6)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    cfg.tol.validate();
    const bool json = cfg.format == "json";

    if (*make) {
      if (make_samples) {
        if (make_samples->find(',') == std::string::npos && make_samples->find('.') == std::string::npos) {
          make_params.sample_count = std::stoi(*make_samples);
        } else {
          std::string_view rest(*make_samples);
          while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view tok = rest.substr(0, comma);
            double v = 0.0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
              throw sidi::Error(sidi::ErrorCode::BadParams, "bad sample '" + std::string(tok) + "'");
            }
            make_params.samples.push_back(v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
          }
        }
      }
      const auto name = sidi::parse_example_name(make_name);
      const auto field = sidi::build_example(name, make_params);
      std::string meta = "{\"example\":\"" + std::string(sidi::to_string(name)) + "\"";
      if (make_params.phi) meta += ",\"phi\":\"" + *make_params.phi + "\"";
      meta += "}";
      emit(cfg, sidi::format_field(field, meta));
      return 0;
    }

    if (*analyze) {
      const auto doc = sidi::read_field(analyze_field);
      const auto cert = sidi::decide(doc.field, cfg.bound, cfg.tol);
      if (json) {
        emit(cfg, sidi::format_certificate(cert));
      } else {
        if (!cfg.out.empty()) emit(cfg, sidi::format_certificate(cert));
        std::cout << certificate_summary(cert);
      }
      return sidi::exit_code(cert.verdict);
    }

    if (*verify) {
      const auto doc = sidi::read_field(verify_field);
      const auto cert = sidi::read_certificate(verify_cert);
      const auto result = sidi::verify_certificate(doc.field, cert, cert.tolerances);
      for (const auto& f : result.failures) std::cerr << "FAIL " << f << "\n";
      std::ostringstream s;
      if (json) {
        s << "{\"ok\": " << (result.ok ? "true" : "false") << ", \"checks\": " << result.checks
          << ", \"failures\": " << result.failures.size() << "}\n";
      } else {
        s << (result.ok ? "OK" : "FAILED") << " (" << result.checks << " checks, "
          << result.failures.size() << " failures)\n";
      }
      emit(cfg, s.str());
      return result.ok ? 0 : 1;
    }

    if (*scan) {
      const auto name = sidi::parse_example_name(scan_name);
      const auto params = parse_range(scan_range, scan_list);
      const auto trend = sidi::scan_family(sidi::family_builder(name), params, cfg.tol);
      if (!scan_csv.empty()) {
        std::ostringstream csv;
        csv << "param,norm\n";
        for (std::size_t k = 0; k < trend.params.size(); ++k) {
          csv << trend.params[k] << "," << num(trend.norms[k]) << "\n";
        }
        RunConfig csv_cfg = cfg;
        csv_cfg.out = scan_csv;
        emit(csv_cfg, csv.str());
      }
      emit(cfg, trend_summary(trend, json));
      return 0;
    }

    if (*report) {
      const auto doc = sidi::read_field(report_field);
      std::vector<sidi::FiberReport> reports;
      const auto& space = doc.field.space();
      if (!report_label.empty() && !space.index_of(report_label)) {
        throw sidi::Error(sidi::ErrorCode::InvalidArgument, "no point '" + report_label + "'");
      }
      for (std::size_t i = 0; i < doc.field.size(); ++i) {
        const auto& label = space.point(i).label;
        if (!report_label.empty() && label != report_label) continue;
        auto r = sidi::analyze_fiber(doc.field.fiber(i), cfg.tol, label);
        if (brute_trials > 0 && r.dim <= 6) {
          const auto found =
              sidi::brute_idempotent_search(doc.field.fiber(i), brute_trials, cfg.tol, cfg.seed);
          r.notes.push_back("search found " + std::to_string(found.size()) +
                            " nontrivial idempotents in " + std::to_string(brute_trials) +
                            " trials");
        }
        reports.push_back(std::move(r));
      }
      emit(cfg, json ? sidi::format_fiber_reports(reports) : fiber_summary(reports));
      return 0;
    }
  } catch (const sidi::Error& e) {
    std::cerr << "sidi: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "sidi: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
