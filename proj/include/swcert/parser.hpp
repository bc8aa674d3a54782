#pragma once

#include <optional>
#include <string>

#include "swcert/model.hpp"

namespace swcert {

struct ParseResult {
  std::optional<SwitchedModel> model;
  Diagnostics diagnostics;

  bool ok() const { return model.has_value() && diagnostics.ok(); }
};

/// Parses the .ssm model language. Deterministic; decimal literals are stored
/// as exact rationals. Structural acceptance only; run well_formed() for the
/// kind-shape checks.
ParseResult parse_model(const std::string& text);

/// Parses a predicate in the model expression language over the given
/// variables (used for --region and test fixtures).
Predicate parse_predicate(const std::string& text, const std::vector<std::string>& vars);

/// Parses a polynomial expression over the given variables.
Poly parse_poly(const std::string& text, const std::vector<std::string>& vars);

}  // namespace swcert
