#ifndef KICKCAST_CONSENSUS_HPP
#define KICKCAST_CONSENSUS_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kickcast/bracket.hpp"
#include "kickcast/parallel.hpp"
#include "kickcast/rng.hpp"
#include "kickcast/types.hpp"

namespace kickcast {

// Quoted odds with the bookmaker's margin removed. delta is the proportion of
// bets actually paid out; 1 - delta is the overround.
struct AdjustedBook {
  std::string bookmaker;
  double delta = 0;
  std::map<TeamId, double> probs;
};

// Removes stake and overround from quoted odds. With quoted = odds * delta + 1
// and p = 1 / (odds + 1), the payout proportion delta is the unique root of
//   sum_i delta / (quoted_i - 1 + delta) = 1,
// which is strictly increasing in delta. Solved by bisection on (1e-6, 1).
inline AdjustedBook strip_overround(const OddsSheet& sheet) {
  if (sheet.quotes.empty()) throw input_error("strip_overround: empty odds sheet");
  for (const auto& [team, quote] : sheet.quotes)
    if (!(quote > 1.0))
      throw input_error("strip_overround: quoted odds for " + team + " must exceed 1");

  auto excess = [&](double delta) {
    double sum = 0;
    for (const auto& [team, quote] : sheet.quotes) sum += delta / (quote - 1.0 + delta);
    return sum - 1.0;
  };

  const double at_one = excess(1.0);
  double delta;
  if (at_one < -1e-12) {
    throw input_error("strip_overround: book '" + sheet.bookmaker +
                      "' pays out more than it takes in (no delta in (0,1] reproduces it)");
  } else if (at_one <= 1e-12) {
    delta = 1.0;  // zero-overround book, boundary case
  } else {
    double lo = 1e-6, hi = 1.0;
    for (int i = 0; i < 80 && (hi - lo) > 1e-16; ++i) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) < 0 ? lo : hi) = mid;
    }
    delta = 0.5 * (lo + hi);
  }

  AdjustedBook book;
  book.bookmaker = sheet.bookmaker;
  book.delta = delta;
  for (const auto& [team, quote] : sheet.quotes)
    book.probs[team] = delta / (quote - 1.0 + delta);
  return book;
}

// Mean winning log-odds per team across books, transformed back to the
// probability scale and renormalized to sum to one.
inline std::map<TeamId, double> consensus_probabilities(std::span<const AdjustedBook> books) {
  if (books.empty()) throw input_error("consensus_probabilities: no books");
  const auto& reference = books.front().probs;
  std::map<TeamId, double> logit_sum;
  for (const auto& book : books) {
    if (book.probs.size() != reference.size())
      throw input_error("consensus_probabilities: books cover different team sets");
    for (const auto& [team, p] : book.probs) {
      if (!reference.count(team))
        throw input_error("consensus_probabilities: team '" + team + "' missing from a book");
      if (!(p > 0.0 && p < 1.0))
        throw input_error("consensus_probabilities: probability out of (0,1) for " + team);
      logit_sum[team] += std::log(p / (1.0 - p));
    }
  }
  std::map<TeamId, double> consensus;
  double total = 0;
  for (const auto& [team, s] : logit_sum) {
    const double mean_logit = s / static_cast<double>(books.size());
    const double p = 1.0 / (1.0 + std::exp(-mean_logit));
    consensus[team] = p;
    total += p;
  }
  for (auto& [team, p] : consensus) p /= total;
  return consensus;
}

// Pr(A beats B) under the classical paired-comparison model.
inline double bradley_terry(double ability_a, double ability_b) {
  if (!(ability_a > 0) || !(ability_b > 0))
    throw input_error("bradley_terry: abilities must be positive");
  return ability_a / (ability_a + ability_b);
}

namespace detail {

// Tournament simulator used by the inverse fit: matches are Bernoulli draws
// with Bradley-Terry probabilities (no scores, no draws), groups rank by win
// count with ties broken by lot.
class BtTournament {
 public:
  BtTournament(const CompiledBracket& bracket, std::span<const double> abilities)
      : bracket_(bracket) {
    const int n = static_cast<int>(abilities.size());
    win_prob_.assign(n * n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) win_prob_[a * n + b] = bradley_terry(abilities[a], abilities[b]);
    n_ = n;
  }

  // Returns the champion's team index for one simulated tournament.
  int run(Rng& rng) const {
    std::array<std::array<int, 4>, 6> ranks;
    std::array<CompiledBracket::ThirdKey, 6> third_keys;
    for (int g = 0; g < 6; ++g) {
      const auto& members = bracket_.groups()[g];
      std::array<int, 4> wins{};
      for (const auto& [a, b] : kGroupFixtures) {
        if (beats(members[a], members[b], rng))
          ++wins[a];
        else
          ++wins[b];
      }
      std::array<uint64_t, 4> lot;
      for (auto& l : lot) l = rng.next();
      std::array<int, 4> order{0, 1, 2, 3};
      std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (wins[x] != wins[y]) return wins[x] > wins[y];
        return lot[x] < lot[y];
      });
      for (int p = 0; p < 4; ++p) ranks[g][p] = members[order[p]];
      third_keys[g] = {wins[order[2]], 0, 0};
    }
    const uint8_t qualified = CompiledBracket::select_best_thirds(third_keys, rng);

    std::array<int, 8> r16_winner;
    for (int i = 0; i < 8; ++i) {
      auto [a, b] = bracket_.resolve_r16_fixture(bracket_.round_of_16()[i], ranks, qualified);
      r16_winner[i] = beats(a, b, rng) ? a : b;
    }
    std::array<int, 4> qf_winner;
    for (int i = 0; i < 4; ++i) {
      const auto& [h, w] = bracket_.quarter_finals()[i];
      const int a = r16_winner[h.match], b = r16_winner[w.match];
      qf_winner[i] = beats(a, b, rng) ? a : b;
    }
    std::array<int, 2> sf_winner;
    for (int i = 0; i < 2; ++i) {
      const auto& [h, w] = bracket_.semi_finals()[i];
      const int a = qf_winner[h.match], b = qf_winner[w.match];
      sf_winner[i] = beats(a, b, rng) ? a : b;
    }
    const auto& [h, w] = bracket_.final_fixture();
    const int a = sf_winner[h.match], b = sf_winner[w.match];
    return beats(a, b, rng) ? a : b;
  }

 private:
  bool beats(int a, int b, Rng& rng) const { return rng.bernoulli(win_prob_[a * n_ + b]); }

  const CompiledBracket& bracket_;
  std::vector<double> win_prob_;
  int n_;
};

inline std::vector<int64_t> bt_champion_counts(const CompiledBracket& bracket,
                                               std::span<const double> abilities, int64_t runs,
                                               uint64_t seed) {
  const BtTournament sim(bracket, abilities);
  const int n = static_cast<int>(abilities.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::vector<int64_t>> partial(hw, std::vector<int64_t>(n, 0));
  // Integer counts combine exactly, so chunking does not affect the result;
  // each run derives its generator from (seed, run index).
  parallel_chunks(runs, [&](int64_t begin, int64_t end, int64_t chunk) {
    auto& counts = partial[static_cast<size_t>(chunk % hw)];
    for (int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::derive(seed, {static_cast<uint64_t>(r)});
      ++counts[static_cast<size_t>(sim.run(rng))];
    }
  });
  std::vector<int64_t> total(n, 0);
  for (const auto& counts : partial)
    for (int i = 0; i < n; ++i) total[i] += counts[i];
  return total;
}

}  // namespace detail

// Champion frequency per team over seeded Bradley-Terry tournament runs.
inline std::map<TeamId, double> simulate_bt_tournament(const std::map<TeamId, double>& abilities,
                                                       const TournamentSpec& spec, int64_t runs,
                                                       uint64_t seed) {
  if (runs < 1) throw input_error("simulate_bt_tournament: runs must be at least 1");
  const CompiledBracket bracket(spec);
  std::vector<double> ability_vec;
  for (const auto& team : bracket.teams()) {
    auto it = abilities.find(team);
    if (it == abilities.end())
      throw input_error("simulate_bt_tournament: missing ability for " + team);
    if (!(it->second > 0))
      throw input_error("simulate_bt_tournament: ability for " + team + " must be positive");
    ability_vec.push_back(it->second);
  }
  const auto counts = detail::bt_champion_counts(bracket, ability_vec, runs, seed);
  std::map<TeamId, double> freq;
  for (size_t i = 0; i < counts.size(); ++i)
    freq[bracket.teams()[i]] = static_cast<double>(counts[i]) / static_cast<double>(runs);
  return freq;
}

struct InverseFitConfig {
  int64_t runs_per_iter = 100000;
  int max_iters = 50;
  double tol = 5e-4;      // max absolute deviation from the target probabilities
  double damping = 0.5;   // step size of the log-ability update
  uint64_t seed = 1;
};

struct ConsensusResult {
  std::map<TeamId, double> consensus_probs;
  std::map<TeamId, double> log_abilities;  // natural log, geometric mean pinned to 1
  double fit_error = 0;                    // max_i |sim_i - target_i| at the reported point
  bool converged = false;
  int iterations = 0;
};

// Finds Bradley-Terry abilities whose simulated champion probabilities match
// the target probabilities: damped fixed-point iteration on the log scale,
//   log a_i <- log a_i + damping * (log target_i - log sim_i),
// renormalizing the geometric mean to one after every pass. Non-convergence
// is reported, not thrown; the best iterate is still returned.
inline ConsensusResult fit_abilities_inverse(const std::map<TeamId, double>& target_probs,
                                             const TournamentSpec& spec,
                                             const InverseFitConfig& cfg = {}) {
  if (cfg.runs_per_iter < 1 || cfg.max_iters < 1)
    throw input_error("fit_abilities_inverse: invalid configuration");
  const CompiledBracket bracket(spec);
  const size_t n = bracket.teams().size();

  std::vector<double> target;
  double target_sum = 0;
  for (const auto& team : bracket.teams()) {
    auto it = target_probs.find(team);
    if (it == target_probs.end())
      throw input_error("fit_abilities_inverse: missing target probability for " + team);
    if (!(it->second > 0))
      throw input_error("fit_abilities_inverse: target probability for " + team +
                        " must be positive");
    target.push_back(it->second);
    target_sum += it->second;
  }
  if (std::abs(target_sum - 1.0) > 1e-6)
    throw input_error("fit_abilities_inverse: target probabilities must sum to 1");
  for (auto& t : target) t /= target_sum;

  // Start from the target log-odds themselves; for a uniform target this is
  // exactly the symmetric fixed point.
  std::vector<double> log_ability(n);
  double mean = 0;
  for (size_t i = 0; i < n; ++i) {
    log_ability[i] = std::log(target[i]);
    mean += log_ability[i];
  }
  mean /= static_cast<double>(n);
  for (auto& la : log_ability) la -= mean;

  // The empirical frequency of an outcome never seen in runs_per_iter runs is
  // floored at half a count to keep the log update finite.
  const double sim_floor = 0.5 / static_cast<double>(cfg.runs_per_iter);

  ConsensusResult result;
  std::vector<double> ability(n), sim(n);
  std::vector<double> best_log_ability = log_ability;
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    result.iterations = iter;
    for (size_t i = 0; i < n; ++i) ability[i] = std::exp(log_ability[i]);
    const auto counts =
        detail::bt_champion_counts(bracket, ability, cfg.runs_per_iter,
                                   Rng::derive(cfg.seed, {static_cast<uint64_t>(iter)}).next());
    double err = 0;
    for (size_t i = 0; i < n; ++i) {
      sim[i] = static_cast<double>(counts[i]) / static_cast<double>(cfg.runs_per_iter);
      err = std::max(err, std::abs(sim[i] - target[i]));
    }
    if (err < best_err) {
      best_err = err;
      best_log_ability = log_ability;
    }
    if (err < cfg.tol) {
      result.converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;
    double shift = 0;
    for (size_t i = 0; i < n; ++i) {
      log_ability[i] += cfg.damping * (std::log(target[i]) - std::log(std::max(sim[i], sim_floor)));
      shift += log_ability[i];
    }
    shift /= static_cast<double>(n);
    for (auto& la : log_ability) la -= shift;  // geometric mean back to 1
  }

  result.fit_error = best_err;
  for (size_t i = 0; i < n; ++i) {
    result.log_abilities[bracket.teams()[i]] = best_log_ability[i];
    result.consensus_probs[bracket.teams()[i]] = target[i];
  }
  return result;
}

// --- serialization ------------------------------------------------------------

inline nlohmann::json consensus_result_to_json(const ConsensusResult& result) {
  nlohmann::json probs = nlohmann::json::object();
  nlohmann::json abilities = nlohmann::json::object();
  for (const auto& [team, p] : result.consensus_probs) probs[team] = p;
  for (const auto& [team, la] : result.log_abilities) abilities[team] = la;
  return nlohmann::json{{"consensus_probs", probs},
                        {"log_abilities", abilities},
                        {"fit_error", result.fit_error},
                        {"converged", result.converged},
                        {"iterations", result.iterations}};
}

inline ConsensusResult consensus_result_from_json(const nlohmann::json& j) {
  ConsensusResult result;
  try {
    for (const auto& [team, p] : j.at("consensus_probs").items())
      result.consensus_probs[team] = p.get<double>();
    for (const auto& [team, la] : j.at("log_abilities").items())
      result.log_abilities[team] = la.get<double>();
    result.fit_error = j.at("fit_error").get<double>();
    result.converged = j.value("converged", true);
    result.iterations = j.value("iterations", 0);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("invalid consensus JSON: ") + e.what());
  }
  return result;
}

}  // namespace kickcast

#endif
