#pragma once

#include <algorithm>
#include <string>

#include <json.hpp>

#include "omplab/errors.hpp"

namespace omplab {

/// Outcome of checking the isometry-side hypothesis a bound is conditional on.
enum class PremiseStatus {
  holds,              // conclusively satisfied
  refuted,            // conclusively violated
  inconclusive,       // sampling bounds could not decide either way
  premise_undefined,  // the required order exceeds the signal dimension
  not_checked,
};

inline const char* to_string(PremiseStatus s) {
  switch (s) {
    case PremiseStatus::holds: return "holds";
    case PremiseStatus::refuted: return "refuted";
    case PremiseStatus::inconclusive: return "inconclusive";
    case PremiseStatus::premise_undefined: return "premise_undefined";
    case PremiseStatus::not_checked: return "not_checked";
  }
  return "not_checked";
}

inline PremiseStatus premise_status_from_string(const std::string& s) {
  if (s == "holds") return PremiseStatus::holds;
  if (s == "refuted") return PremiseStatus::refuted;
  if (s == "inconclusive") return PremiseStatus::inconclusive;
  if (s == "premise_undefined") return PremiseStatus::premise_undefined;
  if (s == "not_checked") return PremiseStatus::not_checked;
  throw ContractViolation("premise_status: unknown value '" + s + "'");
}

/// lhs <= rhs up to the fixed floating-point slack used by every verifier.
inline bool bound_holds(double lhs, double rhs) {
  return lhs <= rhs + 1e-9 * std::max(1.0, rhs);
}

/// One evaluated inequality: lhs vs rhs, the slack-adjusted verdict, the
/// premise status, and free-form context (orders, exponents, seeds, ...).
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  PremiseStatus premise = PremiseStatus::not_checked;
  nlohmann::json context = nlohmann::json::object();
};

inline BoundReport make_report(std::string name, double lhs, double rhs,
                               PremiseStatus premise = PremiseStatus::not_checked,
                               nlohmann::json context = nlohmann::json::object()) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.holds = bound_holds(lhs, rhs);
  r.premise = premise;
  r.context = std::move(context);
  return r;
}

inline nlohmann::json to_json(const BoundReport& r) {
  return nlohmann::json{{"name", r.name},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"holds", r.holds},
                        {"premise_status", to_string(r.premise)},
                        {"context", r.context}};
}

}  // namespace omplab
