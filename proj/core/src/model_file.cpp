#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evolve/error.hpp"
#include "evolve/model.hpp"

namespace evolve {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& message) { throw Error(ErrorCode::schema, message); }

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) schema_error(where + ": unknown field '" + item.key() + "'");
  }
}

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) schema_error(where + " must be a number");
  return value.get<double>();
}

Vec3 vector_at(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3) schema_error(where + " must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) v(i) = number_at(value[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Mat3 matrix_at(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3) schema_error(where + " must be a 3x3 nested array");
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.row(i) = vector_at(value[i], where + "[" + std::to_string(i) + "]").transpose();
  return m;
}

expr::ConstantValue constant_at(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_array() && value.size() == 3 && value[0].is_array()) return matrix_at(value, where);
  if (value.is_array()) return vector_at(value, where);
  schema_error(where + " must be a number, a 3-array or a 3x3 nested array");
}

TimeDomain time_domain_at(const json& doc) {
  TimeDomain domain;
  if (!doc.contains("time_domain")) return domain;
  const json& td = doc["time_domain"];
  if (!td.is_array() || td.size() != 2) schema_error("time_domain must be [lo, hi]");
  domain.lo = number_at(td[0], "time_domain[0]");
  domain.hi = number_at(td[1], "time_domain[1]");
  if (!(domain.lo < domain.hi)) schema_error("time_domain requires lo < hi");
  return domain;
}

std::string string_at(const json& value, const std::string& where) {
  if (!value.is_string()) schema_error(where + " must be a string");
  return value.get<std::string>();
}

FixedParticleContext liquid_crystal_params(const json& params) {
  if (!params.is_object()) schema_error("params must be an object");
  reject_unknown_keys(params, {"e", "g", "c", "mu", "what"}, "params");
  FixedParticleContext ctx;
  if (params.contains("e")) ctx.e = vector_at(params["e"], "params.e");
  if (params.contains("g")) ctx.g = matrix_at(params["g"], "params.g");
  if (params.contains("c")) ctx.c = number_at(params["c"], "params.c");
  if (params.contains("mu")) {
    const json& mu = params["mu"];
    if (mu.is_string()) {
      ctx.mu = parse_stiffness(mu.get<std::string>());
    } else if (mu.is_number()) {
      ctx.mu = parse_stiffness(json(mu).dump());
    } else if (mu.is_object()) {
      reject_unknown_keys(mu, {"onset", "rate"}, "params.mu");
      CubicOnset onset;
      if (mu.contains("onset")) onset.t_on = number_at(mu["onset"], "params.mu.onset");
      if (mu.contains("rate")) onset.rate = number_at(mu["rate"], "params.mu.rate");
      ctx.mu = onset;
    } else {
      schema_error("params.mu must be an expression string or an onset object");
    }
  }
  if (params.contains("what")) {
    const json& what = params["what"];
    if (what.is_string() && what.get<std::string>() == "identity") {
      ctx.what.clear();
    } else if (what.is_array() && !what.empty()) {
      for (std::size_t k = 0; k < what.size(); ++k) {
        ctx.what.push_back(parse_immersion(string_at(what[k], "params.what[" + std::to_string(k) + "]")));
      }
    } else {
      schema_error("params.what must be \"identity\" or a non-empty array of expressions in r and J");
    }
  }
  return ctx;
}

ConstitutiveModel builtin_model(const json& doc) {
  reject_unknown_keys(doc, {"label", "builtin", "params", "m", "time_domain"}, "model");
  const std::string name = string_at(doc["builtin"], "builtin");
  const std::string label = doc.contains("label") ? string_at(doc["label"], "label") : name;
  const json params = doc.contains("params") ? doc["params"] : json::object();

  ConstitutiveModel model = [&]() {
    if (name == "liquid_crystal") return zoo::liquid_crystal(liquid_crystal_params(params), label);
    if (!params.is_object() || !params.empty()) schema_error("builtin '" + name + "' takes no params");
    if (name == "det_only") return zoo::det_only();
    if (name == "isotropic") return zoo::isotropic();
    if (name == "exp_decay") return zoo::exp_decay();
    schema_error("unknown builtin '" + name + "'");
  }();

  if (doc.contains("m")) {
    if (!doc["m"].is_number_integer() || doc["m"].get<int>() != model.output_dimension()) {
      schema_error("m does not match builtin output dimension " + std::to_string(model.output_dimension()));
    }
  }
  return ConstitutiveModel(label, model.components(), time_domain_at(doc));
}

}  // namespace

ConstitutiveModel parse_model(std::string_view json_text, const std::string& fallback_label) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("model file must contain a JSON object");
  if (doc.contains("builtin")) return builtin_model(doc);

  reject_unknown_keys(doc, {"label", "m", "components", "constants", "time_domain"}, "model");
  const std::string label = doc.contains("label") ? string_at(doc["label"], "label") : fallback_label;
  if (!doc.contains("m") || !doc["m"].is_number_integer()) schema_error("m must be an integer");
  const int m = doc["m"].get<int>();
  if (m < 1) schema_error("m must be at least 1");
  if (!doc.contains("components") || !doc["components"].is_array()) schema_error("components must be an array");
  const json& comps = doc["components"];
  if (static_cast<int>(comps.size()) != m) {
    schema_error("components has " + std::to_string(comps.size()) + " entries, m = " + std::to_string(m));
  }
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    sources.push_back(string_at(comps[i], "components[" + std::to_string(i) + "]"));
  }
  expr::Constants constants;
  if (doc.contains("constants")) {
    if (!doc["constants"].is_object()) schema_error("constants must be an object");
    for (const auto& item : doc["constants"].items()) {
      constants.emplace(item.key(), constant_at(item.value(), "constants." + item.key()));
    }
  }
  return make_expression_model(label, sources, constants, time_domain_at(doc));
}

ConstitutiveModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open model file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io, "cannot read model file '" + path.string() + "'");
  return parse_model(buffer.str(), path.stem().string());
}

}  // namespace evolve
