#ifndef KICKCAST_TESTS_SUPPORT_HPP
#define KICKCAST_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kickcast/rng.hpp"
#include "kickcast/types.hpp"

namespace kickcast::testing {

#ifdef KICKCAST_FIXTURE_DIR
inline std::string fixture_path(const std::string& name) {
  return std::string(KICKCAST_FIXTURE_DIR) + "/" + name;
}
#endif

// ---- independent oracles -----------------------------------------------------

// Direct term-by-term evaluation of the joint pmf in extended precision.
// Deliberately written in linear space, unlike the implementation.
inline long double bivariate_pmf_oracle(int z, int y, long double l1, long double l2,
                                        long double lc) {
  auto fact = [](int n) {
    long double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  auto choose = [&](int n, int k) { return fact(n) / (fact(k) * fact(n - k)); };
  long double series = 0;
  for (int k = 0; k <= std::min(z, y); ++k) {
    long double term = choose(z, k) * choose(y, k) * fact(k);
    for (int j = 0; j < k; ++j) term *= lc / (l1 * l2);
    series += term;
  }
  long double base = std::exp(-(double)(l1 + l2 + lc));
  for (int j = 0; j < z; ++j) base *= l1;
  for (int j = 0; j < y; ++j) base *= l2;
  return base / (fact(z) * fact(y)) * series;
}

// Win/draw/loss by brute-force summation of the pmf over a score grid.
struct OutcomeProbs {
  long double win = 0, draw = 0, loss = 0;
};

inline OutcomeProbs outcome_grid_oracle(long double l1, long double l2, long double lc,
                                        int grid = 30) {
  OutcomeProbs o;
  for (int z = 0; z <= grid; ++z)
    for (int y = 0; y <= grid; ++y) {
      long double p = bivariate_pmf_oracle(z, y, l1, l2, lc);
      if (z > y)
        o.win += p;
      else if (z == y)
        o.draw += p;
      else
        o.loss += p;
    }
  return o;
}

// ---- synthetic data ------------------------------------------------------------

struct SyntheticLeague {
  std::vector<TeamId> teams;
  std::vector<double> true_strengths;  // sum-zero
  double beta0 = 0.1;
  double home_effect = 0.25;
  double lambda_c = 0.1;
  std::vector<MatchRecord> matches;
};

// Simulates a league from known bivariate-Poisson parameters, spreading
// matches uniformly over the days before the reference date.
inline SyntheticLeague simulate_league(int n_teams, int n_matches, Date reference_date,
                                       int span_days, uint64_t seed,
                                       double strength_sd = 0.5) {
  SyntheticLeague league;
  Rng rng(seed);
  double sum = 0;
  for (int i = 0; i < n_teams; ++i) {
    league.teams.push_back("Team" + std::to_string(i));
    double s = strength_sd * rng.normal();
    league.true_strengths.push_back(s);
    sum += s;
  }
  for (auto& s : league.true_strengths) s -= sum / n_teams;

  for (int m = 0; m < n_matches; ++m) {
    int i = static_cast<int>(rng.uniform_int(n_teams));
    int j = static_cast<int>(rng.uniform_int(n_teams - 1));
    if (j >= i) ++j;
    bool neutral = rng.bernoulli(0.5);
    double log_l1 = league.beta0 + league.true_strengths[i] - league.true_strengths[j] +
                    (neutral ? 0.0 : league.home_effect);
    double log_l2 = league.beta0 + league.true_strengths[j] - league.true_strengths[i];
    // additive construction: (u + w, v + w) has the required joint law
    int w = rng.poisson(league.lambda_c);
    MatchRecord rec;
    rec.date = Date(reference_date.days_since_epoch() - 1 -
                    static_cast<int>(rng.uniform_int(span_days)));
    rec.home_team = league.teams[i];
    rec.away_team = league.teams[j];
    rec.home_goals = rng.poisson(std::exp(log_l1)) + w;
    rec.away_goals = rng.poisson(std::exp(log_l2)) + w;
    rec.venue_country = neutral ? "Elsewhere" : league.teams[i];
    rec.neutral = neutral;
    league.matches.push_back(rec);
  }
  std::stable_sort(league.matches.begin(), league.matches.end(),
                   [](const MatchRecord& a, const MatchRecord& b) { return a.date < b.date; });
  return league;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / a.size());
}

// 24-team spec following the 2019 knockout template. Teams default to
// T00..T23 in group order A..F.
inline TournamentSpec make_test_spec(std::vector<TeamId> teams = {}) {
  if (teams.empty())
    for (int i = 0; i < 24; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "T%02d", i);
      teams.push_back(buf);
    }
  TournamentSpec spec;
  spec.year = 2019;
  for (int g = 0; g < 6; ++g) {
    std::array<TeamId, 4> members;
    for (int i = 0; i < 4; ++i) members[i] = teams[g * 4 + i];
    spec.groups.emplace_back(std::string(1, static_cast<char>('A' + g)), members);
  }
  spec.round_of_16 = {{{"2A", "2C"},
                       {"1D", "3BEF"},
                       {"1A", "3CDE"},
                       {"2B", "1F"},
                       {"1C", "3ABF"},
                       {"1E", "2D"},
                       {"1B", "3ACD"},
                       {"2E", "2F"}}};
  spec.quarter_finals = {{{"W2", "W1"}, {"W3", "W4"}, {"W6", "W5"}, {"W7", "W8"}}};
  spec.semi_finals = {{{"Q1", "Q2"}, {"Q3", "Q4"}}};
  spec.final_match = {"S1", "S2"};
  auto row = [&](const char* combo, const char* a, const char* b, const char* c,
                 const char* d) {
    spec.third_place_table[combo] = {
        {"1A", a[0]}, {"1B", b[0]}, {"1C", c[0]}, {"1D", d[0]}};
  };
  row("ABCD", "C", "D", "A", "B");
  row("ABCE", "C", "A", "B", "E");
  row("ABCF", "C", "A", "B", "F");
  row("ABDE", "D", "A", "B", "E");
  row("ABDF", "D", "A", "B", "F");
  row("ABEF", "E", "A", "B", "F");
  row("ACDE", "C", "D", "A", "E");
  row("ACDF", "C", "D", "A", "F");
  row("ACEF", "C", "A", "F", "E");
  row("ADEF", "D", "A", "F", "E");
  row("BCDE", "C", "D", "B", "E");
  row("BCDF", "C", "D", "B", "F");
  row("BCEF", "E", "C", "B", "F");
  row("BDEF", "E", "D", "B", "F");
  row("CDEF", "C", "D", "F", "E");
  return spec;
}

// The MyTopSportsbooks column of the 2015 winning-odds table.
inline std::vector<std::pair<TeamId, double>> mytopsportsbooks_2015() {
  return {{"United States", 4.00}, {"Germany", 4.50},     {"France", 5.50},
          {"Japan", 9.00},         {"Brazil", 9.00},      {"Canada", 15.00},
          {"Sweden", 17.00},       {"England", 21.00},    {"Norway", 34.00},
          {"Australia", 51.00},    {"China PR", 61.00},   {"Spain", 67.00},
          {"Netherlands", 81.00},  {"South Korea", 81.00},{"Switzerland", 101.00},
          {"New Zealand", 151.00}, {"Nigeria", 201.00},   {"Colombia", 251.00},
          {"Mexico", 251.00},      {"Ecuador", 501.00},   {"Cameroon", 501.00},
          {"Ivory Coast", 501.00}, {"Costa Rica", 1001.00},{"Thailand", 5001.00}};
}

}  // namespace kickcast::testing

#endif
