#pragma once

// Internal JSON helpers shared by the field and certificate formats.
// Numbers are written with 17 significant digits through std::to_chars so
// output is locale independent and byte-identical across runs.

#include <string>

#include <json.hpp>

#include "sidi/matrix_core.hpp"

namespace sidi::detail {

using json = nlohmann::json;

std::string format_double(double v);

/// Serializes with sorted keys; objects nested at depth < `expand_depth`
/// are broken over lines, everything deeper is written inline.
std::string dump(const json& j, int expand_depth = 2);

/// Matrix as a list of rows, each entry [re, im].
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

void write_atomically(const std::string& path, const std::string& contents);
std::string read_text(const std::string& path);

}  // namespace sidi::detail
