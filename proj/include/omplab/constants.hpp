#pragma once

#include <cmath>
#include <optional>

#include "omplab/errors.hpp"

// Closed-form constants of the recovery guarantees. All of them are simple
// functions of the isometry level delta in (0, 1], the error exponent q in
// [1, 2], and (for C3) a boundedness constant C:
//
//   alpha = ceil(16 + 15 delta)
//   C1 = (2 alpha)^(1/q - 1/2) * (2(1+delta)(sqrt(11+20 delta)+1) + 1)
//   C0 = 1 + C1 + (2 alpha)^(1/q - 1/2)
//   C2 = 2(1+delta)(sqrt(11+20 delta)+1) + 3
//   C3 = 1 + sqrt(C (1+delta)) * (1 + sqrt(11+20 delta))

namespace omplab {

/// ceil(16 + 15*delta) for delta in (0, 1]. Values within 1e-9 of an integer
/// are snapped to it first, so exact rational boundaries (e.g. delta = 1/15)
/// are not pushed up by representation error.
inline int alpha_of(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ContractViolation("alpha_of: delta must be in (0, 1]");
  }
  const double u = 16.0 + 15.0 * delta;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= 1e-9) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(u));
}

struct TheoremConstants {
  double delta = 0.0;
  double q = 2.0;
  int alpha = 0;
  double C0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  std::optional<double> C3;  // needs the boundedness constant
};

inline TheoremConstants constants(double delta, double q,
                                  std::optional<double> c_bound = std::nullopt) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ContractViolation("constants: delta must be in (0, 1]");
  }
  if (!(q >= 1.0 && q <= 2.0)) throw ContractViolation("constants: q must be in [1, 2]");
  if (c_bound && !(*c_bound > 0.0)) {
    throw ContractViolation("constants: boundedness constant must be > 0");
  }
  TheoremConstants c;
  c.delta = delta;
  c.q = q;
  c.alpha = alpha_of(delta);
  const double root = std::sqrt(11.0 + 20.0 * delta);
  const double base = 2.0 * (1.0 + delta) * (root + 1.0);
  const double factor = std::pow(2.0 * c.alpha, 1.0 / q - 0.5);
  c.C1 = factor * (base + 1.0);
  c.C0 = 1.0 + c.C1 + factor;
  c.C2 = base + 3.0;
  if (c_bound) c.C3 = 1.0 + std::sqrt(*c_bound * (1.0 + delta)) * (1.0 + root);
  return c;
}

}  // namespace omplab
