#include "tsched/variates.hpp"

#include <cmath>

#include "tsched/errors.hpp"

namespace tsched {

double gamma_variate(SeededRng& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error("gamma_variate: shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double g = gamma_variate(rng, shape + 1.0);
    return g * std::pow(rng.uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_variate(SeededRng& rng, double a, double b) {
  const double g1 = gamma_variate(rng, a);
  const double g2 = gamma_variate(rng, b);
  return g1 / (g1 + g2);
}

}  // namespace tsched
