#pragma once

#include "tsched/rng.hpp"

namespace tsched {

// Gamma(shape, 1) via Marsaglia & Tsang's squeeze method. Shapes below 1 use
// the Gamma(shape + 1) * U^(1/shape) boost.
double gamma_variate(SeededRng& rng, double shape);

// Beta(a, b) as G1 / (G1 + G2). Stable for the very large second shapes the
// rareness correction produces (alpha^2 up to ~1e12).
double beta_variate(SeededRng& rng, double a, double b);

// Source of Beta variates consumed by the selection rules. Tests substitute a
// scripted source to force particular scores.
class VariateSource {
 public:
  virtual ~VariateSource() = default;
  virtual double beta(double a, double b) = 0;
};

class RngVariateSource final : public VariateSource {
 public:
  explicit RngVariateSource(SeededRng& rng) : rng_(rng) {}
  double beta(double a, double b) override { return beta_variate(rng_, a, b); }

 private:
  SeededRng& rng_;
};

}  // namespace tsched
