#include "sidi/field_io.hpp"

#include "detail/field_json.hpp"
#include "detail/json_util.hpp"

namespace sidi {

namespace detail {

json field_to_json(const OperatorField& field) {
  json space = json::array();
  for (const auto& p : field.space().points()) {
    space.push_back({{"label", p.label}, {"weight", p.weight}, {"dim", p.dim}});
  }
  json fibers = json::array();
  for (const auto& f : field.fibers()) fibers.push_back(matrix_to_json(f));
  return {{"space", std::move(space)}, {"fibers", std::move(fibers)}};
}

OperatorField field_from_json(const json& j) {
  if (!j.is_object() || !j.contains("space") || !j.contains("fibers")) {
    throw Error(ErrorCode::MalformedInput, "field document needs 'space' and 'fibers'");
  }
  const auto& space = j.at("space");
  const auto& fibers = j.at("fibers");
  if (!space.is_array() || !fibers.is_array()) {
    throw Error(ErrorCode::MalformedInput, "'space' and 'fibers' must be lists");
  }
  std::vector<SamplePoint> points;
  for (const auto& p : space) {
    if (!p.is_object() || !p.contains("label") || !p.contains("weight") || !p.contains("dim")) {
      throw Error(ErrorCode::MalformedInput, "space entries need label, weight and dim");
    }
    const auto& label = p.at("label");
    SamplePoint sp;
    if (label.is_string()) {
      sp.label = label.get<std::string>();
    } else if (label.is_number()) {
      sp.label = label.is_number_float() ? format_double(label.get<double>()) : label.dump();
    } else {
      throw Error(ErrorCode::MalformedInput, "label must be a string or a number");
    }
    if (!p.at("weight").is_number() || !p.at("dim").is_number_integer()) {
      throw Error(ErrorCode::MalformedInput, "weight must be a number and dim an integer");
    }
    sp.weight = p.at("weight").get<double>();
    sp.dim = p.at("dim").get<int>();
    points.push_back(std::move(sp));
  }
  std::vector<CMatrix> mats;
  for (const auto& f : fibers) mats.push_back(matrix_from_json(f));
  try {
    return OperatorField(PartitionedSpace(std::move(points)), std::move(mats));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
}

}  // namespace detail

FieldDocument parse_field(std::string_view text) {
  detail::json j;
  try {
    j = detail::json::parse(text);
  } catch (const detail::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
  FieldDocument doc{detail::field_from_json(j), "{}"};
  if (j.contains("meta")) {
    if (!j.at("meta").is_object()) throw Error(ErrorCode::MalformedInput, "'meta' must be an object");
    doc.meta_json = j.at("meta").dump();
  }
  return doc;
}

FieldDocument read_field(const std::string& path) { return parse_field(detail::read_text(path)); }

std::string format_field(const OperatorField& field, std::string_view meta_json) {
  detail::json j = detail::field_to_json(field);
  j["meta"] = detail::json::parse(meta_json.empty() ? std::string_view("{}") : meta_json);
  return detail::dump(j);
}

void write_field(const std::string& path, const OperatorField& field, std::string_view meta_json) {
  detail::write_atomically(path, format_field(field, meta_json));
}

}  // namespace sidi
