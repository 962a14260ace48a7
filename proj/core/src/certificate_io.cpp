#include "sidi/certificate_io.hpp"

#include "detail/field_json.hpp"
#include "detail/json_util.hpp"

namespace sidi {

namespace {

using detail::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedCertificate, what);
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json tolerances_to_json(const Tolerances& t) {
  return {{"tol_zero", t.tol_zero}, {"tol_cluster", t.tol_cluster}, {"max_cond", t.max_cond}};
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number()) malformed(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string string_member(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) malformed(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

const json& array_member(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_array()) malformed(std::string("'") + key + "' must be a list");
  return v;
}

CMatrix matrix(const json& j) {
  try {
    return detail::matrix_from_json(j);
  } catch (const Error& e) {
    malformed(e.what());
  }
}

// Per-point entries must list the certificate's labels in order.
void expect_label(const json& entry, const std::vector<std::string>& labels, std::size_t i) {
  if (i >= labels.size() || string_member(entry, "label") != labels[i]) {
    malformed("per-point entries do not follow the label list");
  }
}

}  // namespace

std::string format_certificate(const Certificate& c) {
  json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["bound_used"] = c.bound_used;
  j["tolerances"] = tolerances_to_json(c.tolerances);
  j["tool_version"] = c.tool_version;
  j["labels"] = c.labels;

  json atoms = json::array();
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    json mats = json::array();
    for (const auto& e : c.atoms[i]) mats.push_back(detail::matrix_to_json(e));
    atoms.push_back({{"label", c.labels.at(i)}, {"matrices", std::move(mats)}});
  }
  j["atoms"] = std::move(atoms);

  json orth = json::array();
  for (std::size_t i = 0; i < c.orthogonalizers.size(); ++i) {
    orth.push_back({{"label", c.labels.at(i)},
                    {"matrix", detail::matrix_to_json(c.orthogonalizers[i])}});
  }
  j["orthogonalizers"] = std::move(orth);

  j["si_field"] = c.si_field ? detail::field_to_json(*c.si_field) : json(nullptr);

  if (c.witness) {
    json fibers = json::array();
    for (std::size_t i = 0; i < c.witness->fibers.size(); ++i) {
      fibers.push_back({{"label", c.labels.at(i)},
                        {"matrix", detail::matrix_to_json(c.witness->fibers[i])}});
    }
    j["witness"] = {{"label", c.witness->label},
                    {"norm", c.witness->norm},
                    {"fibers", std::move(fibers)}};
  } else {
    j["witness"] = nullptr;
  }

  const auto& d = c.diagnostics;
  j["diagnostics"] = {{"central_bound", d.central_bound},
                      {"refined_bound", d.refined_bound ? json(*d.refined_bound) : json(nullptr)},
                      {"capped", d.capped},
                      {"ill_conditioned", d.ill_conditioned},
                      {"notes", d.notes}};
  return detail::dump(j);
}

Certificate parse_certificate(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  if (!j.is_object()) malformed("certificate must be an object");

  Certificate c;
  c.verdict = verdict_from_string(string_member(j, "verdict"));
  c.bound_used = number(j, "bound_used");
  const json& t = member(j, "tolerances");
  c.tolerances = {number(t, "tol_zero"), number(t, "tol_cluster"), number(t, "max_cond")};
  try {
    c.tolerances.validate();
  } catch (const Error& e) {
    malformed(e.what());
  }
  c.tool_version = string_member(j, "tool_version");
  for (const auto& l : array_member(j, "labels")) {
    if (!l.is_string()) malformed("labels must be strings");
    c.labels.push_back(l.get<std::string>());
  }

  const json& atoms = array_member(j, "atoms");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    expect_label(atoms[i], c.labels, i);
    std::vector<CMatrix> mats;
    for (const auto& m : array_member(atoms[i], "matrices")) mats.push_back(matrix(m));
    c.atoms.push_back(std::move(mats));
  }
  const json& orth = array_member(j, "orthogonalizers");
  for (std::size_t i = 0; i < orth.size(); ++i) {
    expect_label(orth[i], c.labels, i);
    c.orthogonalizers.push_back(matrix(member(orth[i], "matrix")));
  }

  const json& si = member(j, "si_field");
  if (!si.is_null()) {
    try {
      c.si_field = detail::field_from_json(si);
    } catch (const Error& e) {
      malformed(e.what());
    }
  }

  const json& w = member(j, "witness");
  if (!w.is_null()) {
    Witness wit;
    wit.label = string_member(w, "label");
    wit.norm = number(w, "norm");
    const json& fibers = array_member(w, "fibers");
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      expect_label(fibers[i], c.labels, i);
      wit.fibers.push_back(matrix(member(fibers[i], "matrix")));
    }
    c.witness = std::move(wit);
  }

  const json& d = member(j, "diagnostics");
  c.diagnostics.central_bound = number(d, "central_bound");
  const json& refined = member(d, "refined_bound");
  if (!refined.is_null()) {
    if (!refined.is_number()) malformed("'refined_bound' must be a number or null");
    c.diagnostics.refined_bound = refined.get<double>();
  }
  const json& capped = member(d, "capped");
  if (!capped.is_boolean()) malformed("'capped' must be a boolean");
  c.diagnostics.capped = capped.get<bool>();
  for (const char* key : {"ill_conditioned", "notes"}) {
    auto& dest = std::string_view(key) == "notes" ? c.diagnostics.notes
                                                   : c.diagnostics.ill_conditioned;
    for (const auto& s : array_member(d, key)) {
      if (!s.is_string()) malformed(std::string("'") + key + "' must hold strings");
      dest.push_back(s.get<std::string>());
    }
  }
  return c;
}

Certificate read_certificate(const std::string& path) {
  std::string text;
  try {
    text = detail::read_text(path);
  } catch (const Error& e) {
    malformed(e.what());
  }
  return parse_certificate(text);
}

void write_certificate(const std::string& path, const Certificate& c) {
  detail::write_atomically(path, format_certificate(c));
}

std::string format_fiber_reports(const std::vector<FiberReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    json central = json::array();
    for (const auto& ci : r.central) {
      central.push_back({{"eigenvalue", complex_to_json(ci.eigenvalue)},
                         {"multiplicity", ci.multiplicity},
                         {"norm", ci.norm},
                         {"projector", detail::matrix_to_json(ci.projector)}});
    }
    json jordan = json::array();
    for (const auto& cl : r.jordan.clusters) {
      jordan.push_back({{"eigenvalue", complex_to_json(cl.eigenvalue)},
                        {"block_sizes", cl.block_sizes}});
    }
    out.push_back({{"label", r.label},
                   {"dim", r.dim},
                   {"si", r.si},
                   {"ill_conditioned", r.ill_conditioned},
                   {"jordan", std::move(jordan)},
                   {"central", std::move(central)},
                   {"max_central_norm", r.max_central_norm},
                   {"notes", r.notes}});
  }
  return detail::dump(json{{"fibers", std::move(out)}}, 3);
}

}  // namespace sidi
