#ifndef KICKCAST_RATING_HPP
#define KICKCAST_RATING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kickcast/optim.hpp"
#include "kickcast/types.hpp"

namespace kickcast {

// Weight of a match played days_back calendar days before the reference
// date: (1/2)^(days_back / half_period). A match one half-period old counts
// half as much as one played today.
inline double time_weight(double days_back, double half_period) {
  if (!(half_period > 0)) throw input_error("time_weight: half_period must be positive");
  if (days_back < 0) throw input_error("time_weight: days_back must be non-negative");
  return std::exp2(-days_back / half_period);
}

struct DecayConfig {
  double half_period = 500.0;  // calendar days
  Date reference_date;
};

namespace detail {

inline double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Joint log-probability of a score (z, y) when the two counts share a
// covariance component lambda_c:
//
//   P(z, y) = (l1^z l2^y / z! y!) exp(-(l1 + l2 + lc))
//             * sum_{k=0}^{min(z,y)} C(z,k) C(y,k) k! (lc / (l1 l2))^k
//
// Evaluated in log space with a log-sum-exp over k. Also returns the partial
// derivatives with respect to the three intensities (needed by the fit).
struct BivariatePoissonEval {
  double log_p;
  double d_l1, d_l2, d_lc;
};

inline BivariatePoissonEval bivariate_poisson_eval(int z, int y, double l1, double l2,
                                                   double lc) {
  if (z < 0 || y < 0) throw input_error("bivariate poisson: goals must be non-negative");
  if (!(l1 > 0) || !(l2 > 0) || !std::isfinite(l1) || !std::isfinite(l2))
    throw input_error("bivariate poisson: intensities must be positive and finite");
  if (!(lc >= 0) || !std::isfinite(lc))
    throw input_error("bivariate poisson: covariance must be non-negative and finite");

  const int k_max = std::min(z, y);
  const double base = z * std::log(l1) + y * std::log(l2) - (l1 + l2 + lc) -
                      std::lgamma(z + 1.0) - std::lgamma(y + 1.0);

  if (lc == 0.0 || k_max == 0) {
    // Only the k = 0 term survives; S = 1 and S' = a_1 = z*y.
    BivariatePoissonEval ev;
    ev.log_p = base;
    ev.d_l1 = z / l1 - 1.0;
    ev.d_l2 = y / l2 - 1.0;
    ev.d_lc = -1.0 + static_cast<double>(z) * y / (l1 * l2);
    return ev;
  }

  // S(x) = sum a_k x^k with x = lc/(l1 l2), a_k = C(z,k) C(y,k) k!.
  const double log_x = std::log(lc) - std::log(l1) - std::log(l2);
  double max_t = -std::numeric_limits<double>::infinity();
  double max_u = -std::numeric_limits<double>::infinity();
  std::array<double, 64> t_buf, u_buf;
  std::vector<double> t_dyn, u_dyn;
  double* t = t_buf.data();
  double* u = u_buf.data();
  if (k_max + 1 > static_cast<int>(t_buf.size())) {
    t_dyn.resize(k_max + 1);
    u_dyn.resize(k_max + 1);
    t = t_dyn.data();
    u = u_dyn.data();
  }
  for (int k = 0; k <= k_max; ++k) {
    const double log_a = log_choose(z, k) + log_choose(y, k) + std::lgamma(k + 1.0);
    t[k] = log_a + k * log_x;
    max_t = std::max(max_t, t[k]);
    if (k >= 1) {
      u[k] = log_a + std::log(static_cast<double>(k)) + (k - 1) * log_x;
      max_u = std::max(max_u, u[k]);
    }
  }
  double sum_t = 0, sum_u = 0;
  for (int k = 0; k <= k_max; ++k) {
    sum_t += std::exp(t[k] - max_t);
    if (k >= 1) sum_u += std::exp(u[k] - max_u);
  }
  const double log_s = max_t + std::log(sum_t);
  const double log_s_prime = max_u + std::log(sum_u);
  const double s_ratio = std::exp(log_s_prime - log_s);  // S'(x) / S(x)

  BivariatePoissonEval ev;
  ev.log_p = base + log_s;
  ev.d_l1 = z / l1 - 1.0 - s_ratio * lc / (l1 * l1 * l2);
  ev.d_l2 = y / l2 - 1.0 - s_ratio * lc / (l1 * l2 * l2);
  ev.d_lc = -1.0 + s_ratio / (l1 * l2);
  return ev;
}

}  // namespace detail

inline double bivariate_poisson_log_pmf(int z, int y, double lambda1, double lambda2,
                                        double lambda_c) {
  return detail::bivariate_poisson_eval(z, y, lambda1, lambda2, lambda_c).log_p;
}

// Fitted strength model. Strengths are on the log-intensity scale and sum to
// zero; the expected score of team i against team j follows
//   log lambda = intercept + (r_i - r_j) + home_effect * 1{i at home}.
struct RatingModel {
  std::map<TeamId, double> strengths;
  double intercept = 0;    // beta0
  double home_effect = 0;  // h
  double covariance = 0;   // lambda_c, shared across matches
  DecayConfig config;
  int n_matches = 0;

  // Fit diagnostics.
  bool converged = false;
  double gradient_norm = 0;
  int iterations = 0;
  bool extreme_strength = false;  // some |r| ran away; treat the fit as suspect

  double strength_of(const TeamId& team) const {
    auto it = strengths.find(team);
    if (it == strengths.end()) throw input_error("unrated team: " + team);
    return it->second;
  }
};

struct FitOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-8;
  bool independent_poisson = false;  // pin lambda_c = 0
  double weight_cutoff = 1e-4;       // drop matches lighter than this
  // Optional starting strengths. They are re-centered before use, so any
  // common shift of the guesses leaves the fit unchanged.
  std::map<TeamId, double> initial_strengths;
};

// The likelihood seen by the optimizer. Strengths are reduced to n-1 free
// parameters with the last strength defined as minus their sum, which keeps
// the sum-to-zero constraint exact; the covariance is exp(xi) so that the
// search space stays unconstrained.
class RatingProblem {
 public:
  RatingProblem(std::span<const MatchRecord> matches, DecayConfig config, FitOptions opts)
      : config_(config), opts_(opts) {
    if (matches.empty()) throw input_error("rating fit: no matches");
    for (const auto& m : matches) {
      const double days_back = static_cast<double>(config.reference_date - m.date);
      if (days_back < 0)
        throw input_error("rating fit: match on " + m.date.to_string() +
                          " is after the reference date");
      const double w = time_weight(days_back, config.half_period);
      if (w < opts.weight_cutoff) continue;
      CompiledMatch cm;
      cm.home = team_index(m.home_team);
      cm.away = team_index(m.away_team);
      cm.home_goals = m.home_goals;
      cm.away_goals = m.away_goals;
      cm.weight = w;
      cm.home_advantage = !m.neutral;
      compiled_.push_back(cm);
    }
    if (compiled_.empty())
      throw input_error("rating fit: every match fell below the weight cutoff");
    if (teams_.size() < 2) throw input_error("rating fit: need at least two distinct teams");
  }

  int n_teams() const { return static_cast<int>(teams_.size()); }
  int n_matches() const { return static_cast<int>(compiled_.size()); }
  const std::vector<TeamId>& teams() const { return teams_; }

  // free strengths + intercept + home effect (+ xi unless independent)
  int n_params() const { return n_teams() - 1 + 2 + (opts_.independent_poisson ? 0 : 1); }

  Eigen::VectorXd initial_point() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_params());
    double goals = 0;
    for (const auto& m : compiled_) goals += m.home_goals + m.away_goals;
    const double mean_goals = goals / (2.0 * compiled_.size());
    x[n_teams() - 1] = std::log(std::max(mean_goals, 1e-3));  // beta0
    if (!opts_.independent_poisson) x[n_teams() + 1] = std::log(0.1);  // xi
    return x;
  }

  // Negative weighted log-likelihood and (optionally) its gradient.
  double negative_log_likelihood(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    const int n = n_teams();
    std::vector<double> r(n);
    double tail = 0;
    for (int i = 0; i < n - 1; ++i) {
      r[i] = theta[i];
      tail -= theta[i];
    }
    r[n - 1] = tail;
    const double beta0 = theta[n - 1];
    const double h = theta[n];
    const double lc = opts_.independent_poisson ? 0.0 : std::exp(theta[n + 1]);

    double total = 0;
    std::vector<double> d_r;
    double d_beta0 = 0, d_h = 0, d_lc_raw = 0;
    if (grad) d_r.assign(n, 0.0);

    for (const auto& m : compiled_) {
      const double adv = m.home_advantage ? 1.0 : 0.0;
      const double log_l1 = beta0 + r[m.home] - r[m.away] + h * adv;
      const double log_l2 = beta0 + r[m.away] - r[m.home];
      // Wild line-search trial points can push exp() past the double range;
      // report an infinite objective and let the search back off.
      if (std::abs(log_l1) > 500 || std::abs(log_l2) > 500) {
        if (grad) grad->setZero(n_params());
        return std::numeric_limits<double>::infinity();
      }
      const double l1 = std::exp(log_l1);
      const double l2 = std::exp(log_l2);
      const auto ev = detail::bivariate_poisson_eval(m.home_goals, m.away_goals, l1, l2, lc);
      total += m.weight * ev.log_p;
      if (grad) {
        const double g1 = m.weight * ev.d_l1 * l1;  // d(w log P)/d(log l1)
        const double g2 = m.weight * ev.d_l2 * l2;
        d_r[m.home] += g1 - g2;
        d_r[m.away] += g2 - g1;
        d_beta0 += g1 + g2;
        d_h += g1 * adv;
        d_lc_raw += m.weight * ev.d_lc;
      }
    }
    if (grad) {
      grad->resize(n_params());
      for (int i = 0; i < n - 1; ++i) (*grad)[i] = -(d_r[i] - d_r[n - 1]);
      (*grad)[n - 1] = -d_beta0;
      (*grad)[n] = -d_h;
      if (!opts_.independent_poisson) (*grad)[n + 1] = -d_lc_raw * lc;
    }
    return -total;
  }

  RatingModel unpack(const Eigen::VectorXd& theta) const {
    const int n = n_teams();
    RatingModel model;
    double tail = 0;
    for (int i = 0; i < n - 1; ++i) {
      model.strengths[teams_[i]] = theta[i];
      tail -= theta[i];
    }
    model.strengths[teams_[n - 1]] = tail;
    model.intercept = theta[n - 1];
    model.home_effect = theta[n];
    model.covariance = opts_.independent_poisson ? 0.0 : std::exp(theta[n + 1]);
    model.config = config_;
    model.n_matches = n_matches();
    for (const auto& [team, r] : model.strengths)
      if (std::abs(r) > 10.0) model.extreme_strength = true;
    return model;
  }

  // Initial point with the given strength guesses, re-centered to sum zero.
  Eigen::VectorXd initial_point_with_strengths(const std::map<TeamId, double>& guesses) const {
    Eigen::VectorXd x = initial_point();
    const int n = n_teams();
    double mean = 0;
    int found = 0;
    for (int i = 0; i < n; ++i) {
      auto it = guesses.find(teams_[i]);
      if (it != guesses.end()) {
        mean += it->second;
        ++found;
      }
    }
    if (found == 0) return x;
    mean /= found;
    for (int i = 0; i < n - 1; ++i) {
      auto it = guesses.find(teams_[i]);
      x[i] = it == guesses.end() ? 0.0 : it->second - mean;
    }
    return x;
  }

  // Initial point seeded from a previous solution; unknown teams start at 0.
  Eigen::VectorXd warm_start(const RatingModel& previous) const {
    Eigen::VectorXd x = initial_point_with_strengths(previous.strengths);
    const int n = n_teams();
    x[n - 1] = previous.intercept;
    x[n] = previous.home_effect;
    if (!opts_.independent_poisson)
      x[n + 1] = std::log(std::max(previous.covariance, 1e-6));
    return x;
  }

 private:
  struct CompiledMatch {
    int home, away;
    int home_goals, away_goals;
    double weight;
    bool home_advantage;
  };

  int team_index(const TeamId& team) {
    auto it = team_to_index_.find(team);
    if (it != team_to_index_.end()) return it->second;
    const int idx = static_cast<int>(teams_.size());
    teams_.push_back(team);
    team_to_index_.emplace(team, idx);
    return idx;
  }

  DecayConfig config_;
  FitOptions opts_;
  std::vector<TeamId> teams_;
  std::map<TeamId, int> team_to_index_;
  std::vector<CompiledMatch> compiled_;
};

// Time-weighted log-likelihood of the matches under a given model. The home
// effect enters the first-named side's intensity only when the match was not
// played on neutral ground.
inline double weighted_log_likelihood(const RatingModel& model,
                                      std::span<const MatchRecord> matches,
                                      const DecayConfig& config) {
  if (matches.empty()) throw input_error("weighted_log_likelihood: no matches");
  double total = 0;
  for (const auto& m : matches) {
    const double days_back = static_cast<double>(config.reference_date - m.date);
    const double w = time_weight(days_back, config.half_period);
    const double r_home = model.strength_of(m.home_team);
    const double r_away = model.strength_of(m.away_team);
    const double adv = m.neutral ? 0.0 : 1.0;
    const double l1 = std::exp(model.intercept + r_home - r_away + model.home_effect * adv);
    const double l2 = std::exp(model.intercept + r_away - r_home);
    total += w * bivariate_poisson_log_pmf(m.home_goals, m.away_goals, l1, l2, model.covariance);
  }
  return total;
}

namespace detail {

inline RatingModel fit_ratings_impl(std::span<const MatchRecord> matches, DecayConfig config,
                                    const FitOptions& opts, const RatingModel* warm) {
  RatingProblem problem(matches, config, opts);
  BfgsOptions bopts;
  bopts.max_iterations = opts.max_iterations;
  bopts.gradient_tol = opts.gradient_tol;
  auto objective = [&problem](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    return problem.negative_log_likelihood(x, &g);
  };
  const Eigen::VectorXd x0 = warm ? problem.warm_start(*warm)
                             : opts.initial_strengths.empty()
                                 ? problem.initial_point()
                                 : problem.initial_point_with_strengths(opts.initial_strengths);
  const BfgsResult res = bfgs_minimize(objective, x0, bopts);
  RatingModel model = problem.unpack(res.x);
  model.converged = res.converged;
  model.gradient_norm = res.gradient_norm;
  model.iterations = res.iterations;
  return model;
}

}  // namespace detail

// Maximum-likelihood strengths from historic matches. Non-convergence is
// reported through the model's diagnostics, not thrown: callers decide.
inline RatingModel fit_ratings(std::span<const MatchRecord> matches, DecayConfig config,
                               const FitOptions& opts = {}) {
  return detail::fit_ratings_impl(matches, config, opts, nullptr);
}

enum class Venue { home_first, home_second, neutral };

struct MatchForecast {
  double lambda_first = 0;
  double lambda_second = 0;
  double p_win = 0;   // first-named team wins
  double p_draw = 0;
  double p_loss = 0;
};

// Expected goals and outcome probabilities for a future pairing. The score
// grid is widened until the truncated mass is within 1e-10 of one.
inline MatchForecast predict_match(const RatingModel& model, const TeamId& first,
                                   const TeamId& second, Venue venue) {
  const double r1 = model.strength_of(first);
  const double r2 = model.strength_of(second);
  MatchForecast f;
  f.lambda_first = std::exp(model.intercept + r1 - r2 +
                            (venue == Venue::home_first ? model.home_effect : 0.0));
  f.lambda_second = std::exp(model.intercept + r2 - r1 +
                             (venue == Venue::home_second ? model.home_effect : 0.0));

  int grid = 16;
  for (;;) {
    double win = 0, draw = 0, loss = 0, mass = 0;
    for (int z = 0; z <= grid; ++z) {
      for (int y = 0; y <= grid; ++y) {
        const double p = std::exp(
            bivariate_poisson_log_pmf(z, y, f.lambda_first, f.lambda_second, model.covariance));
        mass += p;
        if (z > y)
          win += p;
        else if (z == y)
          draw += p;
        else
          loss += p;
      }
    }
    if (1.0 - mass < 1e-10 || grid >= 1024) {
      f.p_win = win;
      f.p_draw = draw;
      f.p_loss = loss;
      return f;
    }
    grid *= 2;
  }
}

// Rank probability score for the ordered outcomes (win, draw, loss):
// half the sum of squared differences between predicted and observed
// cumulative probabilities. 0 is a perfect forecast, 1 the worst.
inline double rank_probability_score(const std::array<double, 3>& probs, int outcome) {
  const double sum = probs[0] + probs[1] + probs[2];
  if (std::abs(sum - 1.0) > 1e-8)
    throw input_error("rank_probability_score: probabilities must sum to 1");
  if (outcome < 0 || outcome > 2)
    throw input_error("rank_probability_score: outcome must be 0 (win), 1 (draw) or 2 (loss)");
  double cum_p = 0, cum_o = 0, score = 0;
  for (int k = 0; k < 2; ++k) {
    cum_p += probs[k];
    cum_o += (outcome == k) ? 1.0 : 0.0;
    score += (cum_p - cum_o) * (cum_p - cum_o);
  }
  return 0.5 * score;
}

inline constexpr std::array<double, 10> default_half_period_grid{
    100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};

struct HalfPeriodScore {
  double half_period = 0;
  double avg_rps = 0;
  int n_forecasts = 0;
  int n_skipped = 0;  // evaluation matches with an unseen team
};

struct TuneResult {
  double best_half_period = 0;
  std::vector<HalfPeriodScore> table;
};

// Rolling-origin evaluation: for every candidate half-period, refit before
// each evaluation date on all strictly earlier matches and score the
// forecasts for that date by RPS. Lowest average RPS wins.
inline TuneResult tune_half_period(std::span<const MatchRecord> matches,
                                   std::span<const double> grid, Date eval_begin, Date eval_end,
                                   const FitOptions& opts = {}) {
  if (grid.empty()) throw input_error("tune_half_period: empty candidate grid");
  std::vector<MatchRecord> sorted(matches.begin(), matches.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MatchRecord& a, const MatchRecord& b) { return a.date < b.date; });
  std::vector<const MatchRecord*> eval;
  for (const auto& m : sorted)
    if (m.date >= eval_begin && m.date < eval_end) eval.push_back(&m);
  if (eval.empty()) throw input_error("tune_half_period: empty evaluation window");

  TuneResult result;
  for (const double hp : grid) {
    HalfPeriodScore score;
    score.half_period = hp;
    double rps_total = 0;
    RatingModel model;
    bool have_model = false;
    Date fitted_for;
    for (const MatchRecord* m : eval) {
      if (!have_model || fitted_for != m->date) {
        std::vector<MatchRecord> train;
        for (const auto& t : sorted) {
          if (t.date >= m->date) break;
          train.push_back(t);
        }
        if (train.empty()) continue;
        DecayConfig cfg{hp, m->date};
        try {
          model = detail::fit_ratings_impl(train, cfg, opts, have_model ? &model : nullptr);
        } catch (const input_error&) {
          continue;  // e.g. all training matches below the weight cutoff
        }
        have_model = true;
        fitted_for = m->date;
      }
      if (!model.strengths.count(m->home_team) || !model.strengths.count(m->away_team)) {
        ++score.n_skipped;
        continue;
      }
      const Venue venue = m->neutral ? Venue::neutral : Venue::home_first;
      const MatchForecast f = predict_match(model, m->home_team, m->away_team, venue);
      const int outcome = m->home_goals > m->away_goals ? 0
                          : m->home_goals == m->away_goals ? 1 : 2;
      rps_total += rank_probability_score({f.p_win, f.p_draw, f.p_loss}, outcome);
      ++score.n_forecasts;
    }
    if (score.n_forecasts > 0) score.avg_rps = rps_total / score.n_forecasts;
    result.table.push_back(score);
  }

  const HalfPeriodScore* best = nullptr;
  for (const auto& s : result.table) {
    if (s.n_forecasts == 0) continue;
    if (!best || s.avg_rps < best->avg_rps) best = &s;
  }
  if (!best) throw input_error("tune_half_period: no candidate produced any forecast");
  result.best_half_period = best->half_period;
  return result;
}

// --- serialization ------------------------------------------------------------

inline nlohmann::json rating_model_to_json(const RatingModel& model) {
  nlohmann::json strengths = nlohmann::json::object();
  for (const auto& [team, r] : model.strengths) strengths[team] = r;
  return nlohmann::json{{"half_period", model.config.half_period},
                        {"reference_date", model.config.reference_date.to_string()},
                        {"beta0", model.intercept},
                        {"home_effect", model.home_effect},
                        {"lambda_c", model.covariance},
                        {"n_matches", model.n_matches},
                        {"converged", model.converged},
                        {"gradient_norm", model.gradient_norm},
                        {"iterations", model.iterations},
                        {"strengths", strengths}};
}

inline RatingModel rating_model_from_json(const nlohmann::json& j) {
  RatingModel model;
  try {
    model.config.half_period = j.at("half_period").get<double>();
    model.config.reference_date = Date::parse(j.at("reference_date").get<std::string>());
    model.intercept = j.at("beta0").get<double>();
    model.home_effect = j.at("home_effect").get<double>();
    model.covariance = j.at("lambda_c").get<double>();
    model.n_matches = j.value("n_matches", 0);
    model.converged = j.value("converged", true);
    model.gradient_norm = j.value("gradient_norm", 0.0);
    model.iterations = j.value("iterations", 0);
    for (const auto& [team, r] : j.at("strengths").items())
      model.strengths[team] = r.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("invalid rating model JSON: ") + e.what());
  }
  return model;
}

}  // namespace kickcast

#endif
