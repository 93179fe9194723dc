#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "kickcast/ingest.hpp"

using namespace kickcast;

namespace {

std::vector<MatchRecord> matches_from(const std::string& csv, Date ref, int window_years) {
  std::istringstream in(csv);
  return load_matches(in, "test.csv", ref, window_years);
}

const char* kMatchHeader = "date,home_team,away_team,home_goals,away_goals,country,neutral\n";

}  // namespace

TEST_CASE("date parsing and arithmetic") {
  Date d = Date::parse("2011-05-19");
  CHECK(d.to_string() == "2011-05-19");
  CHECK(d.year() == 2011);
  CHECK(Date::parse("2011-05-20") - d == 1);
  CHECK(d.add_years(-8).to_string() == "2003-05-19");
  CHECK(Date::parse("2012-02-29").add_years(1).to_string() == "2013-02-28");
  CHECK_FALSE(Date::try_parse("2011-13-01").has_value());
  CHECK_FALSE(Date::try_parse("19/05/2011").has_value());
  CHECK_THROWS_AS(Date::parse("2011-02-30"), input_error);
}

TEST_CASE("team aliases canonicalize") {
  CHECK(canonical_team("USA", "t") == "United States");
  CHECK(canonical_team("  Iceland ", "t") == "Iceland");
  CHECK(canonical_team("Korea Republic", "t") == "South Korea");
  CHECK(canonical_team("Banana Republic", "t") == "Banana Republic");
}

TEST_CASE("load_matches parses rows and flags") {
  std::string csv = std::string(kMatchHeader) +
                    "2011-05-19,Iceland,Bulgaria,6,0,Iceland,no\n"
                    "2011-03-09,United States,Iceland,4,2,Portugal,yes\n";
  auto ms = matches_from(csv, Date::parse("2011-06-01"), 8);
  REQUIRE(ms.size() == 2);
  // sorted ascending by date
  CHECK(ms[0].date.to_string() == "2011-03-09");
  CHECK(ms[0].home_team == "United States");
  CHECK(ms[0].neutral);
  CHECK(ms[1].home_team == "Iceland");
  CHECK(ms[1].away_team == "Bulgaria");
  CHECK(ms[1].home_goals == 6);
  CHECK(ms[1].away_goals == 0);
  CHECK_FALSE(ms[1].neutral);
  CHECK(ms[1].venue_country == "Iceland");
}

TEST_CASE("load_matches window filter") {
  std::string csv = std::string(kMatchHeader) +
                    "2011-06-01,A,B,1,0,A,no\n"   // on the reference date: excluded
                    "2011-05-31,A,B,1,0,A,no\n"   // inside
                    "2003-06-01,A,B,1,0,A,no\n"   // exactly window start: included
                    "2003-05-31,A,B,1,0,A,no\n";  // too old
  auto ms = matches_from(csv, Date::parse("2011-06-01"), 8);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].date.to_string() == "2003-06-01");
  CHECK(ms[1].date.to_string() == "2011-05-31");
}

TEST_CASE("load_matches error paths carry line numbers") {
  Date ref = Date::parse("2011-06-01");
  SECTION("empty file gives empty list") {
    CHECK(matches_from("", ref, 8).empty());
  }
  SECTION("malformed row") {
    std::string csv = std::string(kMatchHeader) + "2011-05-19,Iceland,Bulgaria,6,0\n";
    CHECK_THROWS_WITH(matches_from(csv, ref, 8),
                      Catch::Matchers::ContainsSubstring("test.csv:2"));
  }
  SECTION("unparseable date") {
    std::string csv = std::string(kMatchHeader) + "19.05.2011,Iceland,Bulgaria,6,0,Iceland,no\n";
    CHECK_THROWS_AS(matches_from(csv, ref, 8), input_error);
  }
  SECTION("negative goals") {
    std::string csv = std::string(kMatchHeader) + "2011-05-19,Iceland,Bulgaria,-1,0,Iceland,no\n";
    CHECK_THROWS_AS(matches_from(csv, ref, 8), input_error);
  }
  SECTION("team playing itself") {
    std::string csv = std::string(kMatchHeader) + "2011-05-19,Iceland,Iceland,1,0,Iceland,no\n";
    CHECK_THROWS_AS(matches_from(csv, ref, 8), input_error);
  }
  SECTION("bad window") {
    CHECK_THROWS_AS(matches_from(std::string(kMatchHeader), ref, 0), input_error);
  }
}

TEST_CASE("load_odds long format") {
  std::istringstream in(
      "bookmaker,team,quoted_odds\n"
      "MyTopSportsbooks,United States,4.00\n"
      "MyTopSportsbooks,Thailand,5001.00\n"
      "SportsInsights,United States,4.00\n"
      "SportsInsights,Thailand,5001.00\n"
      "BovadaSportsbook,United States,3.25\n"
      "BovadaSportsbook,Thailand,401.00\n");
  auto sheets = load_odds(in, "odds.csv");
  REQUIRE(sheets.size() == 3);
  CHECK(sheets[0].bookmaker == "MyTopSportsbooks");
  CHECK(sheets[0].quotes.at("United States") == 4.00);
  CHECK(sheets[2].quotes.at("United States") == 3.25);
  CHECK(sheets[1].quotes.at("Thailand") == 5001.00);
}

TEST_CASE("load_odds rejects bad books") {
  SECTION("quote at or below 1") {
    std::istringstream in("bookmaker,team,quoted_odds\nB1,A,0.9\n");
    CHECK_THROWS_WITH(load_odds(in, "odds.csv"),
                      Catch::Matchers::ContainsSubstring("exceed 1"));
  }
  SECTION("team missing from one book") {
    std::istringstream in(
        "bookmaker,team,quoted_odds\n"
        "B1,A,2.0\nB1,B,3.0\n"
        "B2,A,2.0\n");
    CHECK_THROWS_AS(load_odds(in, "odds.csv"), input_error);
  }
  SECTION("different team in second book") {
    std::istringstream in(
        "bookmaker,team,quoted_odds\n"
        "B1,A,2.0\nB1,B,3.0\n"
        "B2,A,2.0\nB2,C,3.0\n");
    CHECK_THROWS_AS(load_odds(in, "odds.csv"), input_error);
  }
}

namespace {

const char* kCovariateHeader =
    "year,team,gdp_ratio,population_ratio,fifa_rank,host,continent,confederation,"
    "max_teammates,second_max_teammates,avg_age,cl_players,mls_players,legionnaires\n";

std::vector<TeamCovariates> covariates_from(const std::string& rows) {
  std::istringstream in(std::string(kCovariateHeader) + rows);
  return load_covariates(in, "cov.csv");
}

}  // namespace

TEST_CASE("load_covariates parses the full schema") {
  auto rows = covariates_from(
      "2011,France,1.3,0.009,3,yes,yes,UEFA,0.38,0.29,25.86,0.24,0.0,0.1\n"
      "2011,Nigeria,0.08,0.023,27,no,no,CAF,0.19,0.1,22.24,0.0,0.05,0.33\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].team == "France");
  CHECK(rows[0].avg_age == 25.86);
  CHECK(rows[0].host);
  CHECK(rows[0].same_continent);
  CHECK(rows[0].confederation == Confederation::UEFA);
  CHECK(rows[1].avg_age == 22.24);
  CHECK(rows[1].fifa_rank == 27);
  CHECK(rows[1].confederation == Confederation::CAF);
}

TEST_CASE("load_covariates validation") {
  SECTION("unknown confederation") {
    CHECK_THROWS_WITH(covariates_from("2011,France,1.3,0.009,3,yes,yes,XYZ,0.38,0.29,25.86,0.24,0,0.1\n"),
                      Catch::Matchers::ContainsSubstring("confederation"));
  }
  SECTION("normalized count out of range") {
    CHECK_THROWS_WITH(covariates_from("2011,France,1.3,0.009,3,yes,yes,UEFA,9,0.29,25.86,0.24,0,0.1\n"),
                      Catch::Matchers::ContainsSubstring("[0,1]"));
  }
  SECTION("fifa rank below 1") {
    CHECK_THROWS_AS(covariates_from("2011,France,1.3,0.009,0,yes,yes,UEFA,0.38,0.29,25.86,0.24,0,0.1\n"),
                    input_error);
  }
  SECTION("missing mandatory column") {
    std::istringstream in("year,team\n2011,France\n");
    CHECK_THROWS_WITH(load_covariates(in, "cov.csv"),
                      Catch::Matchers::ContainsSubstring("missing mandatory column"));
  }
}

TEST_CASE("round trips preserve every value") {
  SECTION("matches") {
    std::string csv = std::string(kMatchHeader) +
                      "2011-05-19,Iceland,Bulgaria,6,0,Iceland,no\n"
                      "2011-03-09,United States,Iceland,4,2,Portugal,yes\n";
    auto ms = matches_from(csv, Date::parse("2011-06-01"), 8);
    std::ostringstream out;
    write_matches(out, ms);
    std::istringstream in(out.str());
    auto again = load_matches(in, "rt.csv", Date::parse("2011-06-01"), 8);
    REQUIRE(again.size() == ms.size());
    for (size_t i = 0; i < ms.size(); ++i) {
      CHECK(again[i].date == ms[i].date);
      CHECK(again[i].home_team == ms[i].home_team);
      CHECK(again[i].away_team == ms[i].away_team);
      CHECK(again[i].home_goals == ms[i].home_goals);
      CHECK(again[i].away_goals == ms[i].away_goals);
      CHECK(again[i].venue_country == ms[i].venue_country);
      CHECK(again[i].neutral == ms[i].neutral);
    }
  }
  SECTION("covariates with awkward doubles") {
    auto rows = covariates_from(
        "2011,France,1.2999999999999998,0.1,3,yes,yes,UEFA,0.3333333333333333,0.29,25.86,0.24,0,0.1\n");
    std::ostringstream out;
    write_covariates(out, rows);
    std::istringstream in(out.str());
    auto again = load_covariates(in, "rt.csv");
    REQUIRE(again.size() == 1);
    // bit-exact round trip of doubles
    CHECK(again[0].gdp_ratio == rows[0].gdp_ratio);
    CHECK(again[0].max_teammates == rows[0].max_teammates);
    CHECK(again[0].avg_age == rows[0].avg_age);
  }
  SECTION("odds") {
    std::istringstream in0(
        "bookmaker,team,quoted_odds\n"
        "B1,A,1.8099999999999998\nB1,B,2.5\n");
    auto sheets = load_odds(in0, "odds.csv");
    std::ostringstream out;
    write_odds(out, sheets);
    std::istringstream in(out.str());
    auto again = load_odds(in, "rt.csv");
    CHECK(again[0].quotes.at("A") == sheets[0].quotes.at("A"));
  }
}

TEST_CASE("load_tournament validates shape") {
  auto spec_json = [](const std::string& groups) {
    return std::string("{\"year\":2019,\"groups\":") + groups +
           R"(,"round_of_16":[
    {"home":"2A","away":"2C"},{"home":"1D","away":"3BEF"},{"home":"1A","away":"3CDE"},
    {"home":"2B","away":"1F"},{"home":"1C","away":"3ABF"},{"home":"1E","away":"2D"},
    {"home":"1B","away":"3ACD"},{"home":"2E","away":"2F"}],
  "quarter_finals":[{"home":"W2","away":"W1"},{"home":"W3","away":"W4"},
                    {"home":"W6","away":"W5"},{"home":"W7","away":"W8"}],
  "semi_finals":[{"home":"Q1","away":"Q2"},{"home":"Q3","away":"Q4"}],
  "final":{"home":"S1","away":"S2"},
  "third_place_table":{"ABCE":{"1A":"C","1B":"A","1C":"B","1D":"E"}}})";
  };
  auto groups_ok = std::string(
      R"({"A":["A1","A2","A3","A4"],"B":["B1","B2","B3","B4"],"C":["C1","C2","C3","C4"],)"
      R"("D":["D1","D2","D3","D4"],"E":["E1","E2","E3","E4"],"F":["F1","F2","F3","F4"]})");

  SECTION("valid spec loads") {
    std::istringstream in(spec_json(groups_ok));
    auto spec = load_tournament(in, "t.json");
    CHECK(spec.year == 2019);
    CHECK(spec.groups.size() == 6);
    CHECK(spec.participants().size() == 24);
    CHECK(spec.round_of_16[6].away == "3ACD");
    CHECK(spec.third_place_table.at("ABCE").at("1D") == 'E');
  }
  SECTION("duplicate team rejected") {
    auto bad = groups_ok;
    bad.replace(bad.find("B1"), 2, "A1");
    std::istringstream in(spec_json(bad));
    CHECK_THROWS_AS(load_tournament(in, "t.json"), input_error);
  }
  SECTION("invalid json rejected") {
    std::istringstream in("{not json");
    CHECK_THROWS_AS(load_tournament(in, "t.json"), input_error);
  }
}
