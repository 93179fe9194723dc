#ifndef KICKCAST_TYPES_HPP
#define KICKCAST_TYPES_HPP

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kickcast/date.hpp"
#include "kickcast/error.hpp"

namespace kickcast {

// Canonical team name. Sources disagree on naming ("USA" vs "United States");
// ingestion maps aliases onto one key.
using TeamId = std::string;

enum class Confederation { CAF, AFC, UEFA, CONCACAF, OFC, CONMEBOL };

inline constexpr std::array<std::string_view, 6> kConfederationNames{
    "CAF", "AFC", "UEFA", "CONCACAF", "OFC", "CONMEBOL"};

inline Confederation parse_confederation(const std::string& s, const std::string& context) {
  for (size_t i = 0; i < kConfederationNames.size(); ++i)
    if (s == kConfederationNames[i]) return static_cast<Confederation>(i);
  throw input_error(context + ": unknown confederation '" + s + "'");
}

inline std::string_view to_string(Confederation c) {
  return kConfederationNames[static_cast<size_t>(c)];
}

// One historic international match.
struct MatchRecord {
  Date date;
  TeamId home_team;  // first-named team; at home unless neutral
  TeamId away_team;
  int home_goals = 0;
  int away_goals = 0;
  TeamId venue_country;
  bool neutral = false;
};

// Per-team, per-tournament covariates. Squad-count fields arrive already
// normalized by squad size and must lie in [0, 1].
struct TeamCovariates {
  int tournament_year = 0;
  TeamId team;
  double gdp_ratio = 0;
  double population_ratio = 0;
  int fifa_rank = 0;
  bool host = false;
  bool same_continent = false;
  Confederation confederation = Confederation::UEFA;
  double max_teammates = 0;
  double second_max_teammates = 0;
  double avg_age = 0;
  double cl_players = 0;
  double mls_players = 0;
  double legionnaires = 0;
};

// Quoted decimal winning odds (stake included, so every quote exceeds 1)
// of a single bookmaker for all tournament participants.
struct OddsSheet {
  std::string bookmaker;
  std::map<TeamId, double> quotes;
};

// A knockout fixture slot. Sources:
//   "1A".."1F"  group winner        "2A".."2F"  group runner-up
//   "3" + eligible group letters    best-third slot, e.g. "3ACD"
//   "W1".."W8"  round-of-16 winner  "Q1".."Q4"  quarter-final winner
//   "S1","S2"   semi-final winner
struct KnockoutSlot {
  std::string home;
  std::string away;
};

// Static description of a 24-team tournament: six groups of four, a
// round-of-16 template, and the combination table assigning qualified
// third-placed teams to group winners.
struct TournamentSpec {
  int year = 0;
  std::vector<std::pair<std::string, std::array<TeamId, 4>>> groups;  // ordered, named A..F
  std::array<KnockoutSlot, 8> round_of_16;
  std::array<KnockoutSlot, 4> quarter_finals;
  std::array<KnockoutSlot, 2> semi_finals;
  KnockoutSlot final_match;
  // Key: qualified third-place groups in alphabetical order ("ABCE").
  // Value: winner slot -> group whose third-placed team it meets.
  std::map<std::string, std::map<std::string, char>> third_place_table;

  std::vector<TeamId> participants() const {
    std::vector<TeamId> all;
    for (const auto& [name, teams] : groups)
      for (const auto& t : teams) all.push_back(t);
    return all;
  }
};

}  // namespace kickcast

#endif
