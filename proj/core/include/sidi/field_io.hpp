#pragma once

// Field file: UTF-8 JSON with keys
//   "space":  [{"label": ..., "weight": ..., "dim": ...}, ...]
//   "fibers": [matrix, ...]   (matrix = list of rows, entries [re, im])
//   "meta":   optional object, carried through verbatim.

#include <string>
#include <string_view>

#include "sidi/field.hpp"

namespace sidi {

struct FieldDocument {
  OperatorField field;
  std::string meta_json = "{}";  ///< serialized "meta" object
};

/// Throws MalformedInput on syntax or schema errors.
FieldDocument parse_field(std::string_view text);
FieldDocument read_field(const std::string& path);

std::string format_field(const OperatorField& field, std::string_view meta_json = "{}");

/// Writes through a temporary file and rename.
void write_field(const std::string& path, const OperatorField& field,
                 std::string_view meta_json = "{}");

}  // namespace sidi
