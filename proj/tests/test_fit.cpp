#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kickcast/rating.hpp"
#include "support.hpp"

using namespace kickcast;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<MatchRecord> repeated_draws(int n, Date ref) {
  std::vector<MatchRecord> ms;
  for (int i = 0; i < n; ++i) {
    MatchRecord m;
    m.date = Date(ref.days_since_epoch() - 1 - (i % 30));
    m.home_team = (i % 2 == 0) ? "A" : "B";
    m.away_team = (i % 2 == 0) ? "B" : "A";
    m.home_goals = 1;
    m.away_goals = 1;
    m.venue_country = "Elsewhere";
    m.neutral = true;
    ms.push_back(m);
  }
  return ms;
}

double sum_strengths(const RatingModel& model) {
  double s = 0;
  for (const auto& [team, r] : model.strengths) s += r;
  return s;
}

}  // namespace

TEST_CASE("symmetric draws force a symmetric model") {
  DecayConfig cfg{500.0, Date::parse("2019-06-01")};
  auto matches = repeated_draws(200, cfg.reference_date);

  // Independent variant: the scoring rate is identified and lands on the
  // observed mean of one goal per team per match.
  FitOptions opts;
  opts.independent_poisson = true;
  auto model = fit_ratings(matches, cfg, opts);
  CHECK_THAT(model.strengths.at("A"), WithinAbs(0.0, 1e-3));
  CHECK_THAT(model.strengths.at("B"), WithinAbs(0.0, 1e-3));
  CHECK_THAT(model.home_effect, WithinAbs(0.0, 1e-3));
  CHECK_THAT(model.intercept, WithinAbs(0.0, 1e-3));  // lambda close to 1
  CHECK_THAT(sum_strengths(model), WithinAbs(0.0, 1e-8));

  // Full model: identical draws are degenerate data (the covariance component
  // can absorb them entirely), but the symmetry conclusions still hold.
  auto biv = fit_ratings(matches, cfg);
  CHECK_THAT(biv.strengths.at("A"), WithinAbs(0.0, 1e-3));
  CHECK_THAT(biv.strengths.at("B"), WithinAbs(0.0, 1e-3));
  CHECK_THAT(biv.home_effect, WithinAbs(0.0, 1e-3));
  CHECK_THAT(sum_strengths(biv), WithinAbs(0.0, 1e-8));
}

TEST_CASE("simulate-then-refit recovers the generating strengths") {
  DecayConfig cfg{500.0, Date::parse("2019-06-01")};
  auto league = testing::simulate_league(20, 2000, cfg.reference_date, 900, 444);
  auto model = fit_ratings(league.matches, cfg);

  REQUIRE(model.strengths.size() == 20);
  CHECK_THAT(sum_strengths(model), WithinAbs(0.0, 1e-8));
  CHECK(model.covariance >= 0.0);

  std::vector<double> truth, fitted;
  for (size_t i = 0; i < league.teams.size(); ++i) {
    truth.push_back(league.true_strengths[i]);
    fitted.push_back(model.strengths.at(league.teams[i]));
  }
  CHECK(testing::pearson(truth, fitted) > 0.98);
  CHECK(testing::rmse(truth, fitted) < 0.1);
  // The fitted model is a local maximizer: nudging any single parameter off
  // the optimum must not increase the weighted likelihood.
  double at_opt = weighted_log_likelihood(model, league.matches, cfg);
  for (double nudge : {1e-3, -1e-3}) {
    RatingModel shifted = model;
    shifted.intercept += nudge;
    CHECK(weighted_log_likelihood(shifted, league.matches, cfg) <= at_opt + 1e-9);
    shifted = model;
    shifted.home_effect += nudge;
    CHECK(weighted_log_likelihood(shifted, league.matches, cfg) <= at_opt + 1e-9);
  }
}

TEST_CASE("fit is invariant to a common shift of the initial guesses") {
  DecayConfig cfg{500.0, Date::parse("2019-06-01")};
  auto league = testing::simulate_league(8, 300, cfg.reference_date, 600, 777);

  FitOptions base;
  for (const auto& t : league.teams) base.initial_strengths[t] = 0.0;
  FitOptions shifted = base;
  for (auto& [team, s] : shifted.initial_strengths) s += 4.2;

  auto m1 = fit_ratings(league.matches, cfg, base);
  auto m2 = fit_ratings(league.matches, cfg, shifted);
  for (const auto& t : league.teams)
    CHECK_THAT(m1.strengths.at(t), WithinAbs(m2.strengths.at(t), 1e-6));
}

TEST_CASE("independent variant pins the covariance at zero") {
  DecayConfig cfg{500.0, Date::parse("2019-06-01")};
  auto league = testing::simulate_league(6, 150, cfg.reference_date, 500, 31);
  FitOptions opts;
  opts.independent_poisson = true;
  auto model = fit_ratings(league.matches, cfg, opts);
  CHECK(model.covariance == 0.0);
  CHECK_THAT(sum_strengths(model), WithinAbs(0.0, 1e-8));
}

TEST_CASE("fit input validation") {
  DecayConfig cfg{500.0, Date::parse("2019-06-01")};
  SECTION("empty matches") {
    CHECK_THROWS_AS(fit_ratings({}, cfg), input_error);
  }
  SECTION("match after the reference date") {
    auto ms = repeated_draws(2, cfg.reference_date);
    ms[0].date = Date::parse("2019-07-01");
    CHECK_THROWS_AS(fit_ratings(ms, cfg), input_error);
  }
  SECTION("all matches below the weight cutoff") {
    auto ms = repeated_draws(4, Date::parse("1990-01-01"));
    CHECK_THROWS_AS(fit_ratings(ms, DecayConfig{10.0, cfg.reference_date}), input_error);
  }
}

TEST_CASE("half-period tuning") {
  SECTION("singleton grid returns its only candidate") {
    DecayConfig cfg{500.0, Date::parse("2019-06-01")};
    auto league = testing::simulate_league(6, 240, cfg.reference_date, 400, 52);
    const double grid[] = {321.0};
    auto result = tune_half_period(league.matches, grid, Date::parse("2019-03-01"),
                                   cfg.reference_date);
    CHECK(result.best_half_period == 321.0);
    REQUIRE(result.table.size() == 1);
    CHECK(result.table[0].n_forecasts > 0);
  }

  SECTION("default grid contains 500 days") {
    bool has500 = false;
    for (double hp : default_half_period_grid) has500 |= (hp == 500.0);
    CHECK(has500);
  }

  SECTION("strongly drifting strengths favor short half-periods") {
    // Two eras: every team's strength flips sign at the era boundary. A short
    // memory tracks the flip; a very long one averages the two eras away.
    Date ref = Date::parse("2019-06-01");
    uint64_t seed = 2024;
    auto era2 = testing::simulate_league(10, 700, ref, 420, seed, 0.8);
    auto era1 = testing::simulate_league(10, 700, Date(ref.days_since_epoch() - 420), 420,
                                         seed, 0.8);
    std::vector<MatchRecord> all = era1.matches;
    // Negate era-1 strengths by swapping each result; on neutral ground a
    // swapped score is exactly what the sign-flipped strengths would produce.
    for (auto& m : all) {
      std::swap(m.home_goals, m.away_goals);
      m.neutral = true;
      m.venue_country = "Elsewhere";
    }
    all.insert(all.end(), era2.matches.begin(), era2.matches.end());

    const double grid[] = {120.0, 2000.0};
    auto result = tune_half_period(all, grid, Date(ref.days_since_epoch() - 60), ref);
    REQUIRE(result.table.size() == 2);
    CHECK(result.table[0].n_forecasts > 0);
    CHECK(result.table[0].avg_rps < result.table[1].avg_rps);
    CHECK(result.best_half_period == 120.0);
  }

  SECTION("empty evaluation window rejected") {
    DecayConfig cfg{500.0, Date::parse("2019-06-01")};
    auto league = testing::simulate_league(4, 60, cfg.reference_date, 300, 9);
    const double grid[] = {500.0};
    CHECK_THROWS_AS(tune_half_period(league.matches, grid, Date::parse("2020-01-01"),
                                     Date::parse("2020-06-01")),
                    input_error);
    CHECK_THROWS_AS(
        tune_half_period(league.matches, std::span<const double>{},
                         Date::parse("2019-01-01"), cfg.reference_date),
        input_error);
  }
}
