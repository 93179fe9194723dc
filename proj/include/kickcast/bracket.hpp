#ifndef KICKCAST_BRACKET_HPP
#define KICKCAST_BRACKET_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kickcast/rng.hpp"
#include "kickcast/types.hpp"

namespace kickcast {

// The six fixtures of a four-team round-robin, in canonical order.
inline constexpr std::array<std::pair<int, int>, 6> kGroupFixtures{
    {{0, 1}, {2, 3}, {0, 2}, {1, 3}, {3, 0}, {1, 2}}};

// TournamentSpec with every slot reference resolved to indices. Teams are
// numbered 0..23 in group order; groups 0..5 follow group-name order.
class CompiledBracket {
 public:
  struct Slot {
    enum class Kind { group_winner, group_runner_up, best_third, r16_winner, qf_winner, sf_winner };
    Kind kind;
    int group = -1;       // group_winner / group_runner_up
    uint8_t eligible = 0; // best_third: bitmask of groups this slot may receive
    int match = -1;       // *_winner: fixture index in the previous round
  };
  using Fixture = std::pair<Slot, Slot>;

  explicit CompiledBracket(const TournamentSpec& spec) {
    if (spec.groups.size() != 6) throw input_error("bracket: exactly 6 groups required");
    for (size_t g = 0; g < 6; ++g) {
      const auto& [name, members] = spec.groups[g];
      if (name.size() != 1 || name[0] < 'A' || name[0] > 'Z')
        throw input_error("bracket: group name must be a single letter, got '" + name + "'");
      group_letters_[g] = name[0];
      for (int i = 0; i < 4; ++i) {
        groups_[g][i] = static_cast<int>(teams_.size());
        teams_.push_back(members[i]);
      }
    }

    std::array<bool, 6> winner_used{}, runner_used{};
    int thirds = 0;
    for (int i = 0; i < 8; ++i) {
      round_of_16_[i] = {parse_group_slot(spec.round_of_16[i].home, winner_used, runner_used, thirds),
                         parse_group_slot(spec.round_of_16[i].away, winner_used, runner_used, thirds)};
    }
    for (int g = 0; g < 6; ++g)
      if (!winner_used[g] || !runner_used[g])
        throw input_error(std::string("bracket: winner or runner-up of group ") +
                          group_letters_[g] + " never enters the round of 16");
    if (thirds != 4) throw input_error("bracket: round of 16 must admit exactly 4 third-placed teams");
    for (const auto& [home, away] : round_of_16_) {
      const bool home_third = home.kind == Slot::Kind::best_third;
      const bool away_third = away.kind == Slot::Kind::best_third;
      if ((home_third && away.kind != Slot::Kind::group_winner) ||
          (away_third && home.kind != Slot::Kind::group_winner))
        throw input_error("bracket: a best-third slot must face a group winner");
    }

    parse_nested(spec.quarter_finals.data(), 4, 'W', 8, quarter_finals_.data());
    parse_nested(spec.semi_finals.data(), 2, 'Q', 4, semi_finals_.data());
    parse_nested(&spec.final_match, 1, 'S', 2, &final_);

    compile_third_table(spec);
  }

  const std::vector<TeamId>& teams() const { return teams_; }
  const std::array<std::array<int, 4>, 6>& groups() const { return groups_; }
  char group_letter(int g) const { return group_letters_[g]; }
  const std::array<Fixture, 8>& round_of_16() const { return round_of_16_; }
  const std::array<Fixture, 4>& quarter_finals() const { return quarter_finals_; }
  const std::array<Fixture, 2>& semi_finals() const { return semi_finals_; }
  const Fixture& final_fixture() const { return final_; }

  // Which winner slot (by group) faces which group's third, for a given set of
  // qualified thirds. entry[g] = group index of the third met by the winner of
  // group g, or -1 when that winner does not play a third.
  const std::array<int8_t, 6>& third_assignment(uint8_t qualified_mask) const {
    auto it = third_table_.find(qualified_mask);
    if (it == third_table_.end())
      throw input_error("bracket: third-place combination table has no row for the realized "
                        "set of qualifying groups");
    return it->second;
  }

  // Sorting key for ranking third-placed teams across groups.
  struct ThirdKey {
    int points = 0;
    int goal_diff = 0;
    int goals_for = 0;
    friend bool operator>(const ThirdKey& a, const ThirdKey& b) {
      if (a.points != b.points) return a.points > b.points;
      if (a.goal_diff != b.goal_diff) return a.goal_diff > b.goal_diff;
      return a.goals_for > b.goals_for;
    }
    friend bool operator==(const ThirdKey& a, const ThirdKey& b) {
      return a.points == b.points && a.goal_diff == b.goal_diff && a.goals_for == b.goals_for;
    }
  };

  // Picks the four best thirds; exact ties at the cut are decided by lot.
  static uint8_t select_best_thirds(const std::array<ThirdKey, 6>& keys, Rng& rng,
                                    bool* used_lot = nullptr) {
    std::array<int, 6> order{0, 1, 2, 3, 4, 5};
    std::array<uint64_t, 6> lot{};
    for (auto& l : lot) l = rng.next();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (!(keys[a] == keys[b])) return keys[a] > keys[b];
      return lot[a] < lot[b];
    });
    if (used_lot) *used_lot = keys[order[3]] == keys[order[4]];
    uint8_t mask = 0;
    for (int i = 0; i < 4; ++i) mask |= static_cast<uint8_t>(1u << order[i]);
    return mask;
  }

  // Teams contesting one round-of-16 fixture once the groups are settled.
  // ranks[g][p] = team index finishing position p in group g.
  std::pair<int, int> resolve_r16_fixture(const Fixture& fixture,
                                          const std::array<std::array<int, 4>, 6>& ranks,
                                          uint8_t qualified_mask) const {
    auto resolve = [&](const Slot& slot, const Slot& partner) -> int {
      switch (slot.kind) {
        case Slot::Kind::group_winner:
          return ranks[slot.group][0];
        case Slot::Kind::group_runner_up:
          return ranks[slot.group][1];
        case Slot::Kind::best_third: {
          const auto& assignment = third_assignment(qualified_mask);
          const int third_group = assignment[partner.group];
          if (third_group < 0)
            throw internal_error("bracket: combination row assigns no third to this winner");
          if (!(slot.eligible & (1u << third_group)))
            throw input_error("bracket: combination table routes an ineligible third into a slot");
          return ranks[third_group][2];
        }
        default:
          throw internal_error("bracket: group-stage slot expected");
      }
    };
    return {resolve(fixture.first, fixture.second), resolve(fixture.second, fixture.first)};
  }

 private:
  Slot parse_group_slot(const std::string& s, std::array<bool, 6>& winner_used,
                        std::array<bool, 6>& runner_used, int& thirds) {
    Slot slot;
    if (s.size() == 2 && (s[0] == '1' || s[0] == '2')) {
      const int g = group_index(s[1], s);
      slot.kind = s[0] == '1' ? Slot::Kind::group_winner : Slot::Kind::group_runner_up;
      slot.group = g;
      auto& used = s[0] == '1' ? winner_used : runner_used;
      if (used[g]) throw input_error("bracket: slot '" + s + "' used twice");
      used[g] = true;
      return slot;
    }
    if (s.size() >= 2 && s[0] == '3') {
      slot.kind = Slot::Kind::best_third;
      for (size_t i = 1; i < s.size(); ++i)
        slot.eligible |= static_cast<uint8_t>(1u << group_index(s[i], s));
      ++thirds;
      return slot;
    }
    throw input_error("bracket: malformed round-of-16 source '" + s + "'");
  }

  void parse_nested(const KnockoutSlot* fixtures, int n, char prefix, int prev_round_size,
                    Fixture* out) {
    std::vector<bool> used(prev_round_size, false);
    auto parse_one = [&](const std::string& s) {
      if (s.size() != 2 || s[0] != prefix || s[1] < '1' ||
          s[1] > static_cast<char>('0' + prev_round_size))
        throw input_error("bracket: malformed knockout source '" + s + "'");
      const int match = s[1] - '1';
      if (used[match]) throw input_error("bracket: knockout source '" + s + "' used twice");
      used[match] = true;
      Slot slot;
      slot.kind = prefix == 'W'   ? Slot::Kind::r16_winner
                  : prefix == 'Q' ? Slot::Kind::qf_winner
                                  : Slot::Kind::sf_winner;
      slot.match = match;
      return slot;
    };
    for (int i = 0; i < n; ++i)
      out[i] = {parse_one(fixtures[i].home), parse_one(fixtures[i].away)};
  }

  int group_index(char letter, const std::string& context) const {
    for (int g = 0; g < 6; ++g)
      if (group_letters_[g] == letter) return g;
    throw input_error(std::string("bracket: unknown group letter '") + letter + "' in '" +
                      context + "'");
  }

  void compile_third_table(const TournamentSpec& spec) {
    // Winner slots that face a third, with that slot's eligibility mask.
    std::array<int, 6> winner_slot_eligible{};
    winner_slot_eligible.fill(-1);
    for (const auto& [home, away] : round_of_16_) {
      const Slot* winner = nullptr;
      const Slot* third = nullptr;
      if (home.kind == Slot::Kind::group_winner && away.kind == Slot::Kind::best_third) {
        winner = &home;
        third = &away;
      } else if (away.kind == Slot::Kind::group_winner && home.kind == Slot::Kind::best_third) {
        winner = &away;
        third = &home;
      } else {
        continue;
      }
      winner_slot_eligible[winner->group] = third->eligible;
    }

    for (const auto& [combo, row] : spec.third_place_table) {
      uint8_t mask = 0;
      for (char letter : combo) mask |= static_cast<uint8_t>(1u << group_index(letter, combo));
      std::array<int8_t, 6> assignment;
      assignment.fill(-1);
      uint8_t assigned = 0;
      for (const auto& [slot_name, letter] : row) {
        if (slot_name.size() != 2 || slot_name[0] != '1')
          throw input_error("bracket: combination rows must key on winner slots like '1A'");
        const int wg = group_index(slot_name[1], slot_name);
        const int tg = group_index(letter, combo);
        if (winner_slot_eligible[wg] < 0)
          throw input_error(std::string("bracket: winner of group ") + group_letters_[wg] +
                            " does not face a third-placed team");
        if (!(winner_slot_eligible[wg] & (1 << tg)))
          throw input_error(std::string("bracket: third of group ") + group_letters_[tg] +
                            " is not eligible for the winner of group " + group_letters_[wg]);
        if (!(mask & (1 << tg)))
          throw input_error(std::string("bracket: combination ") + combo +
                            " assigns a third that did not qualify");
        if (assigned & (1 << tg))
          throw input_error(std::string("bracket: combination ") + combo +
                            " assigns one third twice");
        assigned |= static_cast<uint8_t>(1 << tg);
        assignment[wg] = static_cast<int8_t>(tg);
      }
      if (assigned != mask)
        throw input_error(std::string("bracket: combination ") + combo +
                          " does not place all four qualified thirds");
      third_table_[mask] = assignment;
    }
    // Every 4-of-6 subset must be covered.
    for (uint8_t mask = 0; mask < 64; ++mask) {
      if (std::popcount(mask) != 4) continue;
      if (!third_table_.count(mask))
        throw input_error("bracket: third-place combination table is missing a row "
                          "(15 rows are required)");
    }
  }

  std::vector<TeamId> teams_;
  std::array<std::array<int, 4>, 6> groups_;
  std::array<char, 6> group_letters_;
  std::array<Fixture, 8> round_of_16_;
  std::array<Fixture, 4> quarter_finals_;
  std::array<Fixture, 2> semi_finals_;
  Fixture final_;
  std::map<uint8_t, std::array<int8_t, 6>> third_table_;
};

}  // namespace kickcast

#endif
