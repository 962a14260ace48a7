#pragma once

#include "detail/json_util.hpp"
#include "sidi/field.hpp"

namespace sidi::detail {

json field_to_json(const OperatorField& field);
OperatorField field_from_json(const json& j);

}  // namespace sidi::detail
