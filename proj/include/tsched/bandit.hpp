#pragma once

// Beta-Bernoulli posterior over coverage-map features and the Thompson
// sampling selection rules built on it.
//
// Each feature k carries Beta(alpha[k], beta[k]). An execution that hits k
// adds one to alpha[k] when the execution was interesting and one to beta[k]
// otherwise. Selection draws theta[k] ~ Beta(alpha[k], beta[k]) and optionally
// scales it by a rareness factor that shrinks like 1/alpha[k] for features
// that keep producing interesting inputs:
//
//   RARE_MINUS  argmax theta[k]
//   RARE_PLUS   argmax phi[k] * theta[k],  phi = (a+b) / (a^2 + a + b)
//   SAMPLE      argmax psi[k] * theta[k],  psi ~ Beta(a+b, a^2)
//
// The argmax runs over selectable features only; ties go to the lowest index.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "tsched/coverage.hpp"
#include "tsched/rng.hpp"
#include "tsched/variates.hpp"

namespace tsched {

enum class Variant { kRareMinus, kRarePlus, kSample };

std::optional<Variant> parse_variant(std::string_view name);
std::string_view to_string(Variant variant);

using ActionIndex = std::size_t;

// Counts are stored as doubles: psi needs alpha^2, which overflows 32-bit
// integers after ~65k interesting hits, and doubles hold integers exactly to 2^53.
struct PosteriorState {
  std::vector<double> alpha;
  std::vector<double> beta;

  std::size_t size() const { return alpha.size(); }

  friend bool operator==(const PosteriorState&, const PosteriorState&) = default;
};

PosteriorState init_posterior(std::size_t k_size);

// Sparse reward vector: one (feature, reward) pair per feature with x_k != 0,
// sorted by feature. Features that were not hit carry no observation.
class RewardObservation {
 public:
  struct Entry {
    std::uint32_t feature;
    bool reward;
  };

  explicit RewardObservation(std::size_t k_size) : k_size_(k_size) {}

  std::size_t size() const { return k_size_; }
  std::optional<bool> at(std::size_t k) const;
  const std::vector<Entry>& entries() const { return entries_; }

  void set(std::uint32_t feature, bool reward);

 private:
  std::size_t k_size_;
  std::vector<Entry> entries_;
};

RewardObservation compute_reward(const CoverageMap& coverage, bool interesting);

// Conjugate update. Returns the number of posterior entries touched.
std::size_t update_posterior(PosteriorState& state, const RewardObservation& reward);

// Per-feature draws, always in order k = 0..K-1.
std::vector<double> sample_theta(const PosteriorState& state, VariateSource& source);
std::vector<double> sample_theta(const PosteriorState& state, SeededRng& rng);
std::vector<double> sample_psi(const PosteriorState& state, VariateSource& source);
std::vector<double> sample_psi(const PosteriorState& state, SeededRng& rng);

double expected_phi(double alpha, double beta);
std::vector<double> expected_phi(const PosteriorState& state);

// Normalized posterior means; for display and tests, never used for selection.
std::vector<double> compute_pbar(const PosteriorState& state);

// Lowest-index argmax of scores over mask. Throws EmptyCorpusError if the mask
// has no true entry.
ActionIndex masked_argmax(const std::vector<double>& scores, const std::vector<bool>& mask);

// Draws fresh theta (and psi for SAMPLE) on every call. If `ops` is given, the
// abstract cost (variates drawn + posterior entries read) is added to it.
ActionIndex select_action(const PosteriorState& state, Variant variant,
                          const std::vector<bool>& selectable, VariateSource& source,
                          std::uint64_t* ops = nullptr);
ActionIndex select_action(const PosteriorState& state, Variant variant,
                          const std::vector<bool>& selectable, SeededRng& rng,
                          std::uint64_t* ops = nullptr);

// Versioned text snapshot of a posterior. Reals are written with 17
// significant digits so a save/load round trip is bit-exact.
void save_posterior(std::ostream& out, const PosteriorState& state);
PosteriorState load_posterior(std::istream& in);

}  // namespace tsched
