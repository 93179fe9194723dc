#ifndef KICKCAST_INGEST_HPP
#define KICKCAST_INGEST_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kickcast/csv.hpp"
#include "kickcast/types.hpp"

namespace kickcast {

// Alias table applied at load time so that every source refers to a team by
// the same key. Extend as new spellings show up in data files.
inline const std::map<std::string, std::string>& team_alias_table() {
  static const std::map<std::string, std::string> table{
      {"USA", "United States"},
      {"US", "United States"},
      {"United States of America", "United States"},
      {"Korea Republic", "South Korea"},
      {"Korea DPR", "North Korea"},
      {"China", "China PR"},
      {"Chinese Taipei", "Taiwan"},
      {"Republic of Ireland", "Ireland"},
      {"Cote d'Ivoire", "Ivory Coast"},
      {"Côte d'Ivoire", "Ivory Coast"},
      {"Holland", "Netherlands"},
  };
  return table;
}

inline TeamId canonical_team(const std::string& raw, const std::string& context) {
  size_t b = raw.find_first_not_of(" \t");
  size_t e = raw.find_last_not_of(" \t");
  if (b == std::string::npos) throw input_error(context + ": empty team name");
  std::string name = raw.substr(b, e - b + 1);
  auto it = team_alias_table().find(name);
  return it == team_alias_table().end() ? name : it->second;
}

namespace detail {

inline std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path.string());
  return in;
}

}  // namespace detail

// --- matches.csv ------------------------------------------------------------
// header: date,home_team,away_team,home_goals,away_goals,country,neutral

inline std::vector<MatchRecord> load_matches(std::istream& in, const std::string& source,
                                             Date reference_date, int window_years) {
  if (window_years <= 0) throw input_error("load_matches: window_years must be positive");
  CsvReader reader(in, source, /*allow_empty=*/true);
  if (reader.empty()) return {};
  const size_t c_date = reader.column("date");
  const size_t c_home = reader.column("home_team");
  const size_t c_away = reader.column("away_team");
  const size_t c_hg = reader.column("home_goals");
  const size_t c_ag = reader.column("away_goals");
  const size_t c_country = reader.column("country");
  const size_t c_neutral = reader.column("neutral");

  const Date window_start = reference_date.add_years(-window_years);
  std::vector<MatchRecord> matches;
  CsvRow row;
  while (reader.next(row)) {
    const std::string ctx = reader.where();
    MatchRecord m;
    m.date = Date::parse(row.fields[c_date]);
    m.home_team = canonical_team(row.fields[c_home], ctx);
    m.away_team = canonical_team(row.fields[c_away], ctx);
    m.home_goals = parse_int(row.fields[c_hg], ctx);
    m.away_goals = parse_int(row.fields[c_ag], ctx);
    m.venue_country = canonical_team(row.fields[c_country], ctx);
    m.neutral = parse_bool(row.fields[c_neutral], ctx);
    if (m.home_goals < 0 || m.away_goals < 0)
      throw input_error(ctx + ": negative goal count");
    if (m.home_team == m.away_team)
      throw input_error(ctx + ": a team cannot play itself (" + m.home_team + ")");
    if (m.date < window_start || m.date >= reference_date) continue;
    matches.push_back(std::move(m));
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const MatchRecord& a, const MatchRecord& b) { return a.date < b.date; });
  return matches;
}

inline std::vector<MatchRecord> load_matches(const std::filesystem::path& path,
                                             Date reference_date, int window_years) {
  auto in = detail::open_file(path);
  return load_matches(in, path.string(), reference_date, window_years);
}

inline void write_matches(std::ostream& out, const std::vector<MatchRecord>& matches) {
  out << "date,home_team,away_team,home_goals,away_goals,country,neutral\n";
  for (const auto& m : matches) {
    out << m.date.to_string() << ',' << m.home_team << ',' << m.away_team << ','
        << m.home_goals << ',' << m.away_goals << ',' << m.venue_country << ','
        << (m.neutral ? "yes" : "no") << '\n';
  }
}

// --- odds.csv ---------------------------------------------------------------
// long format: bookmaker,team,quoted_odds

inline std::vector<OddsSheet> load_odds(std::istream& in, const std::string& source) {
  CsvReader reader(in, source);
  const size_t c_book = reader.column("bookmaker");
  const size_t c_team = reader.column("team");
  const size_t c_odds = reader.column("quoted_odds");

  std::vector<OddsSheet> sheets;
  std::map<std::string, size_t> index;
  CsvRow row;
  while (reader.next(row)) {
    const std::string ctx = reader.where();
    const std::string& book = row.fields[c_book];
    if (book.empty()) throw input_error(ctx + ": empty bookmaker id");
    TeamId team = canonical_team(row.fields[c_team], ctx);
    double quote = parse_double(row.fields[c_odds], ctx);
    if (!(quote > 1.0))
      throw input_error(ctx + ": stake-inclusive odds must exceed 1, got " +
                        row.fields[c_odds]);
    auto [it, inserted] = index.try_emplace(book, sheets.size());
    if (inserted) sheets.push_back(OddsSheet{book, {}});
    auto& quotes = sheets[it->second].quotes;
    if (!quotes.emplace(team, quote).second)
      throw input_error(ctx + ": duplicate quote for " + team + " by " + book);
  }
  if (sheets.empty()) throw input_error(source + ": no odds rows");
  const auto& reference = sheets.front();
  for (const auto& sheet : sheets) {
    if (sheet.quotes.size() != reference.quotes.size())
      throw input_error(source + ": bookmaker '" + sheet.bookmaker +
                        "' covers a different team set");
    for (const auto& [team, quote] : reference.quotes)
      if (!sheet.quotes.count(team))
        throw input_error(source + ": bookmaker '" + sheet.bookmaker + "' is missing team '" +
                          team + "'");
  }
  return sheets;
}

inline std::vector<OddsSheet> load_odds(const std::filesystem::path& path) {
  auto in = detail::open_file(path);
  return load_odds(in, path.string());
}

inline void write_odds(std::ostream& out, const std::vector<OddsSheet>& sheets) {
  out << "bookmaker,team,quoted_odds\n";
  for (const auto& sheet : sheets)
    for (const auto& [team, quote] : sheet.quotes)
      out << sheet.bookmaker << ',' << team << ',' << format_double(quote) << '\n';
}

// --- covariates.csv ----------------------------------------------------------
// header: year,team,gdp_ratio,population_ratio,fifa_rank,host,continent,
//         confederation,max_teammates,second_max_teammates,avg_age,cl_players,
//         mls_players,legionnaires

inline std::vector<TeamCovariates> load_covariates(std::istream& in, const std::string& source) {
  CsvReader reader(in, source);
  const size_t c_year = reader.column("year");
  const size_t c_team = reader.column("team");
  const size_t c_gdp = reader.column("gdp_ratio");
  const size_t c_pop = reader.column("population_ratio");
  const size_t c_rank = reader.column("fifa_rank");
  const size_t c_host = reader.column("host");
  const size_t c_cont = reader.column("continent");
  const size_t c_confed = reader.column("confederation");
  const size_t c_maxtm = reader.column("max_teammates");
  const size_t c_maxtm2 = reader.column("second_max_teammates");
  const size_t c_age = reader.column("avg_age");
  const size_t c_cl = reader.column("cl_players");
  const size_t c_mls = reader.column("mls_players");
  const size_t c_leg = reader.column("legionnaires");

  std::vector<TeamCovariates> rows;
  CsvRow row;
  while (reader.next(row)) {
    const std::string ctx = reader.where();
    TeamCovariates c;
    c.tournament_year = parse_int(row.fields[c_year], ctx);
    c.team = canonical_team(row.fields[c_team], ctx);
    c.gdp_ratio = parse_double(row.fields[c_gdp], ctx);
    c.population_ratio = parse_double(row.fields[c_pop], ctx);
    c.fifa_rank = parse_int(row.fields[c_rank], ctx);
    c.host = parse_bool(row.fields[c_host], ctx);
    c.same_continent = parse_bool(row.fields[c_cont], ctx);
    c.confederation = parse_confederation(row.fields[c_confed], ctx);
    c.max_teammates = parse_double(row.fields[c_maxtm], ctx);
    c.second_max_teammates = parse_double(row.fields[c_maxtm2], ctx);
    c.avg_age = parse_double(row.fields[c_age], ctx);
    c.cl_players = parse_double(row.fields[c_cl], ctx);
    c.mls_players = parse_double(row.fields[c_mls], ctx);
    c.legionnaires = parse_double(row.fields[c_leg], ctx);
    if (c.fifa_rank < 1) throw input_error(ctx + ": fifa_rank must be >= 1");
    auto in_unit = [&](double v, const char* name) {
      if (v < 0.0 || v > 1.0)
        throw input_error(ctx + ": " + name + " must lie in [0,1] (normalized by squad size)");
    };
    in_unit(c.max_teammates, "max_teammates");
    in_unit(c.second_max_teammates, "second_max_teammates");
    in_unit(c.cl_players, "cl_players");
    in_unit(c.mls_players, "mls_players");
    in_unit(c.legionnaires, "legionnaires");
    rows.push_back(std::move(c));
  }
  return rows;
}

inline std::vector<TeamCovariates> load_covariates(const std::filesystem::path& path) {
  auto in = detail::open_file(path);
  return load_covariates(in, path.string());
}

inline void write_covariates(std::ostream& out, const std::vector<TeamCovariates>& rows) {
  out << "year,team,gdp_ratio,population_ratio,fifa_rank,host,continent,confederation,"
         "max_teammates,second_max_teammates,avg_age,cl_players,mls_players,legionnaires\n";
  for (const auto& c : rows) {
    out << c.tournament_year << ',' << c.team << ',' << format_double(c.gdp_ratio) << ','
        << format_double(c.population_ratio) << ',' << c.fifa_rank << ','
        << (c.host ? "yes" : "no") << ',' << (c.same_continent ? "yes" : "no") << ','
        << to_string(c.confederation) << ',' << format_double(c.max_teammates) << ','
        << format_double(c.second_max_teammates) << ',' << format_double(c.avg_age) << ','
        << format_double(c.cl_players) << ',' << format_double(c.mls_players) << ','
        << format_double(c.legionnaires) << '\n';
  }
}

// --- tournament.json ----------------------------------------------------------

inline TournamentSpec load_tournament(std::istream& in, const std::string& source) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw input_error(source + ": invalid JSON: " + e.what());
  }
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw input_error(source + ": missing key '" + key + "'");
    return j.at(key);
  };

  TournamentSpec spec;
  spec.year = require("year").get<int>();

  const auto& groups = require("groups");
  if (!groups.is_object() || groups.size() != 6)
    throw input_error(source + ": 'groups' must map exactly 6 group names");
  std::set<TeamId> seen;
  for (const auto& [name, teams] : groups.items()) {
    if (!teams.is_array() || teams.size() != 4)
      throw input_error(source + ": group '" + name + "' must list exactly 4 teams");
    std::array<TeamId, 4> g;
    for (size_t i = 0; i < 4; ++i) {
      g[i] = canonical_team(teams[i].get<std::string>(), source);
      if (!seen.insert(g[i]).second)
        throw input_error(source + ": team '" + g[i] + "' appears in more than one group");
    }
    spec.groups.emplace_back(name, g);
  }
  std::sort(spec.groups.begin(), spec.groups.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  auto read_slots = [&](const char* key, KnockoutSlot* out, size_t n) {
    const auto& arr = require(key);
    if (!arr.is_array() || arr.size() != n)
      throw input_error(source + ": '" + key + "' must list " + std::to_string(n) + " fixtures");
    for (size_t i = 0; i < n; ++i) {
      out[i].home = arr[i].at("home").get<std::string>();
      out[i].away = arr[i].at("away").get<std::string>();
    }
  };
  read_slots("round_of_16", spec.round_of_16.data(), 8);
  read_slots("quarter_finals", spec.quarter_finals.data(), 4);
  read_slots("semi_finals", spec.semi_finals.data(), 2);
  const auto& fin = require("final");
  spec.final_match.home = fin.at("home").get<std::string>();
  spec.final_match.away = fin.at("away").get<std::string>();

  const auto& table = require("third_place_table");
  for (const auto& [combo, assignment] : table.items()) {
    std::map<std::string, char> row;
    for (const auto& [slot, group] : assignment.items()) {
      const auto g = group.get<std::string>();
      if (g.size() != 1) throw input_error(source + ": third_place_table group must be a letter");
      row[slot] = g[0];
    }
    spec.third_place_table[combo] = std::move(row);
  }
  return spec;
}

inline TournamentSpec load_tournament(const std::filesystem::path& path) {
  auto in = detail::open_file(path);
  return load_tournament(in, path.string());
}

}  // namespace kickcast

#endif
