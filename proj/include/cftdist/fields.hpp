#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "cftdist/diffeo.hpp"
#include "cftdist/momentflow.hpp"

namespace cftdist {

// A field read from a JSON descriptor:
//   {"kind":"builtin","name":"gaussian|lorentzian|invgamma|fn","params":{...}}
//   {"kind":"samples","grid":{"kind":"periodic"|"line",...},"values":[...]}
// Builtin parameters: gaussian {tau}, lorentzian {n, b0}, invgamma {gamma, b0},
// fn {n}. Missing parameters take the defaults tau = 1, n = 2 (fn) or 1,
// b0 = 1, gamma = 2.
struct FieldSource {
  nlohmann::json descriptor;
  std::optional<FlowFamily> family;
  int fn_order = 0;
  std::optional<LineField> line_samples;
  std::optional<CircleField> circle_samples;

  std::string name() const;
  bool on_line() const { return family.has_value() || line_samples.has_value(); }
  // Line form; circle fields are pushed through the Cayley map.
  LineField line() const;
  // Circle form on the given grid; line fields are Cayley-pulled,
  // sampled circle fields are spectrally resampled.
  CircleField circle(const PeriodicGrid& grid) const;
};

FieldSource parse_field(const nlohmann::json& j);
nlohmann::json builtin_descriptor(const std::string& name, const nlohmann::json& params);

}  // namespace cftdist
