#include "tsched/bandit.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tsched/errors.hpp"
#include "tsched/snapshot.hpp"

namespace tsched {

namespace {

constexpr std::string_view kPosteriorMagic = "tsched-posterior";
constexpr int kPosteriorVersion = 1;

void check_state_dims(const PosteriorState& state, std::size_t k, const char* what) {
  if (state.alpha.size() != k || state.beta.size() != k) {
    throw DimensionError(std::string(what) + ": posterior has " +
                         std::to_string(state.alpha.size()) + " features, expected " +
                         std::to_string(k));
  }
}

}  // namespace

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "rare-minus") return Variant::kRareMinus;
  if (name == "rare-plus") return Variant::kRarePlus;
  if (name == "sample") return Variant::kSample;
  return std::nullopt;
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kRareMinus: return "rare-minus";
    case Variant::kRarePlus: return "rare-plus";
    case Variant::kSample: return "sample";
  }
  return "?";
}

PosteriorState init_posterior(std::size_t k_size) {
  if (k_size == 0) throw DimensionError("init_posterior: K must be at least 1");
  return PosteriorState{std::vector<double>(k_size, 1.0), std::vector<double>(k_size, 1.0)};
}

std::optional<bool> RewardObservation::at(std::size_t k) const {
  if (k >= k_size_) throw DimensionError("RewardObservation: feature index out of range");
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), k,
      [](const Entry& e, std::size_t key) { return e.feature < key; });
  if (it == entries_.end() || it->feature != k) return std::nullopt;
  return it->reward;
}

void RewardObservation::set(std::uint32_t feature, bool reward) {
  if (feature >= k_size_) throw DimensionError("RewardObservation: feature index out of range");
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), feature,
      [](const Entry& e, std::uint32_t key) { return e.feature < key; });
  if (it != entries_.end() && it->feature == feature) {
    it->reward = reward;
  } else {
    entries_.insert(it, Entry{feature, reward});
  }
}

RewardObservation compute_reward(const CoverageMap& coverage, bool interesting) {
  RewardObservation reward(coverage.size());
  for (std::size_t k = 0; k < coverage.size(); ++k) {
    if (coverage.hits[k] != 0) reward.set(static_cast<std::uint32_t>(k), interesting);
  }
  return reward;
}

std::size_t update_posterior(PosteriorState& state, const RewardObservation& reward) {
  check_state_dims(state, reward.size(), "update_posterior");
  for (const auto& e : reward.entries()) {
    if (e.reward) {
      state.alpha[e.feature] += 1.0;
    } else {
      state.beta[e.feature] += 1.0;
    }
  }
  return reward.entries().size();
}

std::vector<double> sample_theta(const PosteriorState& state, VariateSource& source) {
  std::vector<double> theta(state.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    theta[k] = source.beta(state.alpha[k], state.beta[k]);
  }
  return theta;
}

std::vector<double> sample_theta(const PosteriorState& state, SeededRng& rng) {
  RngVariateSource source(rng);
  return sample_theta(state, source);
}

std::vector<double> sample_psi(const PosteriorState& state, VariateSource& source) {
  std::vector<double> psi(state.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double a = state.alpha[k];
    psi[k] = source.beta(a + state.beta[k], a * a);
  }
  return psi;
}

std::vector<double> sample_psi(const PosteriorState& state, SeededRng& rng) {
  RngVariateSource source(rng);
  return sample_psi(state, source);
}

double expected_phi(double alpha, double beta) {
  return (alpha + beta) / (alpha * alpha + alpha + beta);
}

std::vector<double> expected_phi(const PosteriorState& state) {
  std::vector<double> phi(state.size());
  for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = expected_phi(state.alpha[k], state.beta[k]);
  return phi;
}

std::vector<double> compute_pbar(const PosteriorState& state) {
  if (state.size() == 0) throw DimensionError("compute_pbar: empty posterior");
  std::vector<double> pbar(state.size());
  double total = 0.0;
  for (std::size_t k = 0; k < pbar.size(); ++k) {
    pbar[k] = state.alpha[k] / (state.alpha[k] + state.beta[k]);
    total += pbar[k];
  }
  for (auto& p : pbar) p /= total;
  return pbar;
}

ActionIndex masked_argmax(const std::vector<double>& scores, const std::vector<bool>& mask) {
  if (scores.size() != mask.size()) throw DimensionError("masked_argmax: mask length mismatch");
  std::optional<ActionIndex> best;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!mask[k]) continue;
    if (!best || scores[k] > scores[*best]) best = k;
  }
  if (!best) throw EmptyCorpusError("no selectable feature: seed the corpus first");
  return *best;
}

ActionIndex select_action(const PosteriorState& state, Variant variant,
                          const std::vector<bool>& selectable, VariateSource& source,
                          std::uint64_t* ops) {
  const std::size_t k_size = state.size();
  check_state_dims(state, selectable.size(), "select_action");
  if (std::none_of(selectable.begin(), selectable.end(), [](bool b) { return b; })) {
    throw EmptyCorpusError("no selectable feature: seed the corpus first");
  }

  auto scores = sample_theta(state, source);
  std::uint64_t cost = 2 * k_size;
  switch (variant) {
    case Variant::kRareMinus:
      break;
    case Variant::kRarePlus:
      for (std::size_t k = 0; k < k_size; ++k) {
        scores[k] *= expected_phi(state.alpha[k], state.beta[k]);
      }
      break;
    case Variant::kSample: {
      const auto psi = sample_psi(state, source);
      for (std::size_t k = 0; k < k_size; ++k) scores[k] *= psi[k];
      cost += k_size;
      break;
    }
  }
  if (ops) *ops += cost;
  return masked_argmax(scores, selectable);
}

ActionIndex select_action(const PosteriorState& state, Variant variant,
                          const std::vector<bool>& selectable, SeededRng& rng,
                          std::uint64_t* ops) {
  RngVariateSource source(rng);
  return select_action(state, variant, selectable, source, ops);
}

void save_posterior(std::ostream& out, const PosteriorState& state) {
  out << kPosteriorMagic << ' ' << kPosteriorVersion << '\n';
  out << "k " << state.size() << '\n';
  out << "alpha";
  for (const double a : state.alpha) out << ' ' << format_real(a);
  out << "\nbeta";
  for (const double b : state.beta) out << ' ' << format_real(b);
  out << '\n';
}

PosteriorState load_posterior(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kPosteriorMagic) {
    throw SnapshotError("not a posterior snapshot");
  }
  if (version != kPosteriorVersion) {
    throw SnapshotVersionError("posterior snapshot version " + std::to_string(version) +
                               " is not supported (expected " +
                               std::to_string(kPosteriorVersion) + ")");
  }
  std::string key;
  std::size_t k_size = 0;
  if (!(in >> key >> k_size) || key != "k" || k_size == 0) {
    throw SnapshotError("posterior snapshot: bad size record");
  }
  auto read_vector = [&](std::string_view name) {
    std::string tag;
    if (!(in >> tag) || tag != name) throw SnapshotError("posterior snapshot: missing " + std::string(name));
    std::vector<double> v(k_size);
    for (auto& x : v) {
      std::string token;
      if (!(in >> token)) throw SnapshotError("posterior snapshot: truncated " + std::string(name));
      std::size_t pos = 0;
      try {
        x = std::stod(token, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != token.size() || !(x >= 1.0)) {
        throw SnapshotError("posterior snapshot: invalid value '" + token + "'");
      }
    }
    return v;
  };
  PosteriorState state;
  state.alpha = read_vector("alpha");
  state.beta = read_vector("beta");
  return state;
}

}  // namespace tsched
