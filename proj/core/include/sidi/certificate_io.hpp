#pragma once

// Certificate file: UTF-8 JSON with sorted keys.  Matrices are lists of rows
// with [re, im] entries written to 17 significant digits, so identical
// certificates serialize to identical bytes.

#include <string>
#include <string_view>

#include "sidi/decomposer.hpp"

namespace sidi {

std::string format_certificate(const Certificate& c);
/// Throws MalformedCertificate on syntax or schema errors.
Certificate parse_certificate(std::string_view text);
Certificate read_certificate(const std::string& path);
/// Writes through a temporary file and rename.
void write_certificate(const std::string& path, const Certificate& c);

/// JSON object describing one fiber analysis (used by the fiber-report command).
std::string format_fiber_reports(const std::vector<FiberReport>& reports);

}  // namespace sidi
