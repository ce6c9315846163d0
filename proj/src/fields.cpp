#include "cftdist/fields.hpp"

namespace cftdist {

namespace {

using nlohmann::json;

double number(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw Error(ErrorKind::Config, std::string("parameter '") + key + "' must be a number");
  return p.at(key).get<double>();
}

int integer(const json& p, const char* key, int fallback) {
  const double v = number(p, key, fallback);
  if (v != std::floor(v)) throw Error(ErrorKind::Config, std::string("parameter '") + key + "' must be an integer");
  return static_cast<int>(v);
}

rvec values_of(const json& j) {
  if (!j.contains("values") || !j.at("values").is_array()) throw Error(ErrorKind::Config, "samples need a values array");
  rvec v;
  for (const auto& x : j.at("values")) {
    if (!x.is_number()) throw Error(ErrorKind::Config, "sample values must be numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

json builtin_descriptor(const std::string& name, const json& params) {
  return json{{"kind", "builtin"}, {"name", name}, {"params", params}};
}

FieldSource parse_field(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(ErrorKind::Config, "field descriptor needs a 'kind'");
  FieldSource src;
  src.descriptor = j;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "builtin") {
    if (!j.contains("name")) throw Error(ErrorKind::Config, "builtin field needs a 'name'");
    const std::string name = j.at("name").get<std::string>();
    const json p = j.value("params", json::object());
    if (name == "gaussian") {
      src.family = gaussian_family(number(p, "tau", 1.0));
    } else if (name == "lorentzian") {
      src.family = lorentzian_family(integer(p, "n", 1), number(p, "b0", 1.0));
    } else if (name == "invgamma") {
      src.family = invgamma_family(number(p, "gamma", 2.0), number(p, "b0", 1.0));
    } else if (name == "fn") {
      src.fn_order = integer(p, "n", 2);
      if (src.fn_order < 1) throw Error(ErrorKind::Parameter, "f_n needs n >= 1");
    } else {
      throw Error(ErrorKind::Config, "unknown builtin field '" + name + "'");
    }
    return src;
  }
  if (kind == "samples") {
    if (!j.contains("grid") || !j.at("grid").is_object()) throw Error(ErrorKind::Config, "samples need a grid object");
    const json& g = j.at("grid");
    const std::string gk = g.value("kind", "periodic");
    const rvec v = values_of(j);
    const int n = integer(g, "n_points", static_cast<int>(v.size()));
    if (gk == "periodic") {
      src.circle_samples = CircleField::from_samples(PeriodicGrid(n), v, "samples");
    } else if (gk == "line") {
      if (!g.contains("u_min") || !g.contains("u_max")) throw Error(ErrorKind::Config, "line grid needs u_min and u_max");
      src.line_samples = LineField::from_samples(LineGrid(n, number(g, "u_min", 0.0), number(g, "u_max", 0.0)), v);
    } else {
      throw Error(ErrorKind::Config, "unknown grid kind '" + gk + "'");
    }
    return src;
  }
  throw Error(ErrorKind::Config, "unknown field kind '" + kind + "'");
}

std::string FieldSource::name() const {
  if (family) return family->name();
  if (fn_order > 0) return "f_" + std::to_string(fn_order);
  if (line_samples) return "line samples";
  return "circle samples";
}

LineField FieldSource::line() const {
  if (family) return family->field();
  if (line_samples) return *line_samples;
  if (fn_order > 0) return cayley_push(make_fn_field(fn_order, PeriodicGrid(256)));
  return cayley_push(*circle_samples);
}

CircleField FieldSource::circle(const PeriodicGrid& grid) const {
  if (fn_order > 0) return make_fn_field(fn_order, grid);
  if (circle_samples) return circle_samples->resampled(grid);
  return cayley_pull(line(), grid);
}

}  // namespace cftdist
