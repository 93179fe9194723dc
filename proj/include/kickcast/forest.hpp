#ifndef KICKCAST_FOREST_HPP
#define KICKCAST_FOREST_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kickcast/csv.hpp"
#include "kickcast/parallel.hpp"
#include "kickcast/rng.hpp"
#include "kickcast/types.hpp"

namespace kickcast {

// Feature layout of the training design. Metric covariates enter as signed
// differences from the named team's perspective; host/continent dummies and
// the confederation appear separately for the team and its opponent.
struct FeatureSchema {
  struct Feature {
    std::string name;
    int n_categories = 0;  // 0 = numeric
  };
  std::vector<Feature> features;

  static constexpr int kNumericDiffs = 11;

  static FeatureSchema standard() {
    FeatureSchema s;
    s.features = {{"pois_abil_diff", 0},
                  {"odds_abil_diff", 0},
                  {"fifa_rank_diff", 0},
                  {"age_diff", 0},
                  {"gdp_ratio_diff", 0},
                  {"population_ratio_diff", 0},
                  {"max_teammates_diff", 0},
                  {"second_max_teammates_diff", 0},
                  {"cl_players_diff", 0},
                  {"mls_players_diff", 0},
                  {"legionnaires_diff", 0},
                  {"groupstage", 0},
                  {"host", 0},
                  {"host_oppo", 0},
                  {"continent", 0},
                  {"continent_oppo", 0},
                  {"confed", 6},
                  {"confed_oppo", 6}};
    return s;
  }

  size_t size() const { return features.size(); }
  bool numeric(size_t i) const { return features[i].n_categories == 0; }

  bool operator==(const FeatureSchema& other) const {
    if (features.size() != other.features.size()) return false;
    for (size_t i = 0; i < features.size(); ++i)
      if (features[i].name != other.features[i].name ||
          features[i].n_categories != other.features[i].n_categories)
        return false;
    return true;
  }
};

// One observation: the goals a team scored in one match, with covariates from
// that team's perspective. Every match contributes two rows.
struct FeatureRow {
  double goals = 0;
  TeamId team;
  TeamId opponent;
  std::vector<double> x;  // one value per schema feature; categories as codes
};

// A tournament match with known result, used to build the training design.
struct TrainingMatch {
  int year = 0;
  TeamId team_a;
  TeamId team_b;
  int goals_a = 0;
  int goals_b = 0;
  bool groupstage = true;
};

using AbilityMap = std::map<std::pair<int, TeamId>, double>;

namespace detail {

inline const TeamCovariates& covariates_for(std::span<const TeamCovariates> covariates,
                                            int year, const TeamId& team) {
  for (const auto& c : covariates)
    if (c.tournament_year == year && c.team == team) return c;
  throw input_error("design: no covariates for " + team + " in " + std::to_string(year));
}

inline double ability_for(const AbilityMap& map, int year, const TeamId& team,
                          const char* what) {
  auto it = map.find({year, team});
  if (it == map.end())
    throw input_error(std::string("design: missing ") + what + " ability for " + team + " in " +
                      std::to_string(year));
  return it->second;
}

}  // namespace detail

// Encodes one direction of a match. The numeric block holds differences
// (team minus opponent); dummies and confederations are per side.
inline FeatureRow encode_row(const TeamCovariates& team, const TeamCovariates& oppo,
                             double pois_team, double pois_oppo, double odds_team,
                             double odds_oppo, bool groupstage, double goals = 0) {
  FeatureRow row;
  row.goals = goals;
  row.team = team.team;
  row.opponent = oppo.team;
  row.x = {pois_team - pois_oppo,
           odds_team - odds_oppo,
           static_cast<double>(team.fifa_rank - oppo.fifa_rank),
           team.avg_age - oppo.avg_age,
           team.gdp_ratio - oppo.gdp_ratio,
           team.population_ratio - oppo.population_ratio,
           team.max_teammates - oppo.max_teammates,
           team.second_max_teammates - oppo.second_max_teammates,
           team.cl_players - oppo.cl_players,
           team.mls_players - oppo.mls_players,
           team.legionnaires - oppo.legionnaires,
           groupstage ? 1.0 : 0.0,
           team.host ? 1.0 : 0.0,
           oppo.host ? 1.0 : 0.0,
           team.same_continent ? 1.0 : 0.0,
           oppo.same_continent ? 1.0 : 0.0,
           static_cast<double>(static_cast<int>(team.confederation)),
           static_cast<double>(static_cast<int>(oppo.confederation))};
  return row;
}

// Two rows per match, numeric differences signed from each named team's
// perspective (the two difference blocks are exact negations).
inline std::vector<FeatureRow> build_design(std::span<const TrainingMatch> matches,
                                            std::span<const TeamCovariates> covariates,
                                            const AbilityMap& pois_abil,
                                            const AbilityMap& odds_abil) {
  std::vector<FeatureRow> rows;
  rows.reserve(matches.size() * 2);
  for (const auto& m : matches) {
    if (m.team_a == m.team_b)
      throw input_error("design: a team cannot play itself (" + m.team_a + ")");
    if (m.goals_a < 0 || m.goals_b < 0) throw input_error("design: negative goals");
    const auto& cov_a = detail::covariates_for(covariates, m.year, m.team_a);
    const auto& cov_b = detail::covariates_for(covariates, m.year, m.team_b);
    const double pois_a = detail::ability_for(pois_abil, m.year, m.team_a, "poisson");
    const double pois_b = detail::ability_for(pois_abil, m.year, m.team_b, "poisson");
    const double odds_a = detail::ability_for(odds_abil, m.year, m.team_a, "odds");
    const double odds_b = detail::ability_for(odds_abil, m.year, m.team_b, "odds");
    rows.push_back(encode_row(cov_a, cov_b, pois_a, pois_b, odds_a, odds_b, m.groupstage,
                              static_cast<double>(m.goals_a)));
    rows.push_back(encode_row(cov_b, cov_a, pois_b, pois_a, odds_b, odds_a, m.groupstage,
                              static_cast<double>(m.goals_b)));
  }
  return rows;
}

// --- regression trees -----------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  uint32_t category_mask = 0;  // categorical split: mask bit set -> go left
  int left = -1;
  int right = -1;
  double value = 0;  // mean response of the training rows routed here
  int count = 0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x, const FeatureSchema& schema) const {
    int at = 0;
    for (;;) {
      const TreeNode& node = nodes[at];
      if (node.feature < 0) return node.value;
      const double v = x[node.feature];
      bool go_left;
      if (schema.numeric(node.feature))
        go_left = v <= node.threshold;
      else
        go_left = (node.category_mask >> static_cast<uint32_t>(v)) & 1u;
      at = go_left ? node.left : node.right;
    }
  }
};

struct ForestConfig {
  int trees = 5000;
  int mtry = 0;  // 0 = ceil(p / 3)
  int min_node = 5;
  uint64_t seed = 0;
};

struct Forest {
  FeatureSchema schema;
  ForestConfig config;
  std::vector<RegressionTree> trees;
  std::vector<std::vector<int>> oob_index;  // per tree: rows outside its bootstrap
  bool constant_response = false;
};

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureRow> rows, const FeatureSchema& schema, int mtry,
              int min_node, Rng& rng)
      : rows_(rows), schema_(schema), mtry_(mtry), min_node_(min_node), rng_(rng) {}

  RegressionTree build(std::vector<int> bootstrap) {
    RegressionTree tree;
    grow(tree, std::move(bootstrap));
    return tree;
  }

 private:
  int grow(RegressionTree& tree, std::vector<int> idx) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0;
    for (int i : idx) sum += rows_[i].goals;
    const int n = static_cast<int>(idx.size());
    tree.nodes[node_id].value = sum / n;
    tree.nodes[node_id].count = n;

    if (n < min_node_ || n < 2) return node_id;

    const Split split = best_split(idx, sum);
    if (split.feature < 0) return node_id;

    std::vector<int> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (int i : idx) {
      const double v = rows_[i].x[split.feature];
      const bool go_left = schema_.numeric(split.feature)
                               ? v <= split.threshold
                               : ((split.category_mask >> static_cast<uint32_t>(v)) & 1u);
      (go_left ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    tree.nodes[node_id].category_mask = split.category_mask;
    const int left = grow(tree, std::move(left_idx));
    tree.nodes[node_id].left = left;
    const int right = grow(tree, std::move(right_idx));
    tree.nodes[node_id].right = right;
    return node_id;
  }

  struct Split {
    int feature = -1;
    double threshold = 0;
    uint32_t category_mask = 0;
  };

  // Highest variance reduction among mtry randomly drawn features. With the
  // total sum of squares fixed, maximizing sum_child (sum y)^2 / n is
  // equivalent; ties resolve to the lowest feature index, then the lowest
  // threshold (or subset mask), which keeps fits reproducible.
  Split best_split(const std::vector<int>& idx, double total_sum) {
    const int p = static_cast<int>(schema_.size());
    std::vector<int> candidates(p);
    std::iota(candidates.begin(), candidates.end(), 0);
    for (int i = 0; i < mtry_ && i < p; ++i) {
      const int j = i + static_cast<int>(rng_.uniform_int(p - i));
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(std::min(mtry_, p));
    std::sort(candidates.begin(), candidates.end());

    const int n = static_cast<int>(idx.size());
    const double parent_score = total_sum * total_sum / n;
    Split best;
    double best_gain = 1e-12;  // demand a strictly positive reduction

    for (const int f : candidates) {
      if (schema_.numeric(f)) {
        std::vector<std::pair<double, double>> vals;  // (feature value, response)
        vals.reserve(n);
        for (int i : idx) vals.emplace_back(rows_[i].x[f], rows_[i].goals);
        std::sort(vals.begin(), vals.end());
        double left_sum = 0;
        for (int k = 0; k < n - 1; ++k) {
          left_sum += vals[k].second;
          if (vals[k].first == vals[k + 1].first) continue;
          const int nl = k + 1;
          const double right_sum = total_sum - left_sum;
          const double gain = left_sum * left_sum / nl +
                              right_sum * right_sum / (n - nl) - parent_score;
          if (gain > best_gain) {
            best_gain = gain;
            best.feature = f;
            best.threshold = vals[k].first + 0.5 * (vals[k + 1].first - vals[k].first);
            best.category_mask = 0;
          }
        }
      } else {
        const int n_cats = schema_.features[f].n_categories;
        std::array<double, 32> cat_sum{};
        std::array<int, 32> cat_count{};
        for (int i : idx) {
          const auto c = static_cast<uint32_t>(rows_[i].x[f]);
          cat_sum[c] += rows_[i].goals;
          ++cat_count[c];
        }
        uint32_t present = 0;
        for (int c = 0; c < n_cats; ++c)
          if (cat_count[c] > 0) present |= 1u << c;
        const uint32_t lowest = present & (~present + 1u);
        // Each bipartition once: enumerate subsets containing the lowest
        // present category. Fine for the six confederations.
        for (uint32_t mask = 1; mask < (1u << n_cats); ++mask) {
          if (!(mask & lowest)) continue;
          const uint32_t eff = mask & present;
          if (eff == 0 || eff == present) continue;
          double left_sum = 0;
          int nl = 0;
          for (int c = 0; c < n_cats; ++c)
            if (eff & (1u << c)) {
              left_sum += cat_sum[c];
              nl += cat_count[c];
            }
          const double right_sum = total_sum - left_sum;
          const int nr = n - nl;
          const double gain =
              left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
          if (gain > best_gain) {
            best_gain = gain;
            best.feature = f;
            best.threshold = 0;
            best.category_mask = mask;
          }
        }
      }
    }
    return best;
  }

  std::span<const FeatureRow> rows_;
  const FeatureSchema& schema_;
  int mtry_;
  int min_node_;
  Rng& rng_;
};

}  // namespace detail

// Bagged regression forest: every tree is grown on a bootstrap resample of
// the full training set, splitting on mtry randomly selected features.
// Deterministic given the seed (per-tree generators are derived, so the
// thread count does not matter).
inline Forest fit_forest(std::span<const FeatureRow> rows, const ForestConfig& cfg,
                         const FeatureSchema& schema = FeatureSchema::standard()) {
  if (rows.empty()) throw input_error("fit_forest: no training rows");
  if (cfg.trees < 1) throw input_error("fit_forest: need at least one tree");
  if (cfg.min_node < 1) throw input_error("fit_forest: min_node must be positive");
  const int p = static_cast<int>(schema.size());
  for (const auto& row : rows)
    if (row.x.size() != schema.size())
      throw input_error("fit_forest: row does not match the feature schema");
  for (const auto& row : rows)
    for (size_t f = 0; f < schema.size(); ++f)
      if (!schema.numeric(f)) {
        const double v = row.x[f];
        if (v < 0 || v >= schema.features[f].n_categories || v != std::floor(v))
          throw input_error("fit_forest: invalid category code in feature " +
                            schema.features[f].name);
      }

  Forest forest;
  forest.schema = schema;
  forest.config = cfg;
  forest.config.mtry = cfg.mtry > 0 ? std::min(cfg.mtry, p) : (p + 2) / 3;
  forest.trees.resize(cfg.trees);
  forest.oob_index.resize(cfg.trees);

  const double first = rows.front().goals;
  forest.constant_response = std::all_of(rows.begin(), rows.end(),
                                         [&](const FeatureRow& r) { return r.goals == first; });

  const int n = static_cast<int>(rows.size());
  parallel_for(cfg.trees, [&](int64_t t) {
    Rng rng = Rng::derive(cfg.seed, {0x7453, static_cast<uint64_t>(t)});
    std::vector<int> bootstrap(n);
    std::vector<bool> in_bag(n, false);
    for (int i = 0; i < n; ++i) {
      bootstrap[i] = static_cast<int>(rng.uniform_int(n));
      in_bag[bootstrap[i]] = true;
    }
    detail::TreeBuilder builder(rows, forest.schema, forest.config.mtry, forest.config.min_node,
                                rng);
    forest.trees[t] = builder.build(std::move(bootstrap));
    for (int i = 0; i < n; ++i)
      if (!in_bag[i]) forest.oob_index[t].push_back(i);
  });
  return forest;
}

// Ensemble prediction: the mean of all tree predictions, floored at a small
// positive value because downstream sampling treats it as a Poisson rate.
inline constexpr double kMinPredictedGoals = 1e-6;

inline double predict_goals(const Forest& forest, const FeatureRow& row) {
  if (row.x.size() != forest.schema.size())
    throw input_error("predict_goals: row does not match the forest's feature schema");
  double sum = 0;
  for (const auto& tree : forest.trees) sum += tree.predict(row.x, forest.schema);
  const double mean = sum / static_cast<double>(forest.trees.size());
  return std::max(mean, kMinPredictedGoals);
}

struct ImportanceResult {
  std::map<std::string, double> importance;  // OOB MSE increase per feature
  std::map<std::string, double> std_error;   // of the per-tree mean
  int trees_used = 0;
  int trees_skipped = 0;  // trees with an empty out-of-bag set
};

// Permutation importance: per tree, the increase in out-of-bag MSE after
// shuffling one feature's values among the OOB rows, averaged over trees.
// Baseline predictions are computed on untouched copies.
inline ImportanceResult permutation_importance(const Forest& forest,
                                               std::span<const FeatureRow> rows,
                                               uint64_t seed) {
  if (forest.oob_index.size() != forest.trees.size())
    throw input_error("permutation_importance: forest carries no out-of-bag records");
  for (const auto& row : rows)
    if (row.x.size() != forest.schema.size())
      throw input_error("permutation_importance: row does not match the feature schema");

  const size_t p = forest.schema.size();
  const size_t n_trees = forest.trees.size();
  std::vector<std::vector<double>> delta(n_trees, std::vector<double>(p, 0.0));
  std::vector<uint8_t> skipped(n_trees, 0);

  parallel_for(static_cast<int64_t>(n_trees), [&](int64_t t) {
    const auto& oob = forest.oob_index[t];
    if (oob.empty()) {
      skipped[t] = 1;
      return;
    }
    const auto& tree = forest.trees[t];
    const size_t m = oob.size();
    double base_sse = 0;
    for (int i : oob) {
      const double e = tree.predict(rows[i].x, forest.schema) - rows[i].goals;
      base_sse += e * e;
    }
    const double base_mse = base_sse / static_cast<double>(m);

    std::vector<double> column(m);
    std::vector<double> x;
    for (size_t f = 0; f < p; ++f) {
      for (size_t k = 0; k < m; ++k) column[k] = rows[oob[k]].x[f];
      Rng rng = Rng::derive(seed, {0xbead, static_cast<uint64_t>(t), static_cast<uint64_t>(f)});
      for (size_t k = m; k > 1; --k)
        std::swap(column[k - 1], column[rng.uniform_int(k)]);
      double sse = 0;
      for (size_t k = 0; k < m; ++k) {
        x = rows[oob[k]].x;
        x[f] = column[k];
        const double e = tree.predict(x, forest.schema) - rows[oob[k]].goals;
        sse += e * e;
      }
      delta[t][f] = sse / static_cast<double>(m) - base_mse;
    }
  });

  ImportanceResult result;
  std::vector<double> total(p, 0.0), total_sq(p, 0.0);
  for (size_t t = 0; t < n_trees; ++t) {
    if (skipped[t]) {
      ++result.trees_skipped;
      continue;
    }
    ++result.trees_used;
    for (size_t f = 0; f < p; ++f) {
      total[f] += delta[t][f];
      total_sq[f] += delta[t][f] * delta[t][f];
    }
  }
  if (result.trees_used == 0)
    throw input_error("permutation_importance: every tree has an empty out-of-bag set");
  for (size_t f = 0; f < p; ++f) {
    const auto& name = forest.schema.features[f].name;
    const double mean = total[f] / result.trees_used;
    result.importance[name] = mean;
    if (result.trees_used > 1) {
      const double var = (total_sq[f] - total[f] * mean) / (result.trees_used - 1);
      result.std_error[name] = std::sqrt(std::max(var, 0.0) / result.trees_used);
    }
  }
  return result;
}

// --- design CSV -----------------------------------------------------------------

inline void write_design(std::ostream& out, std::span<const FeatureRow> rows,
                         const FeatureSchema& schema = FeatureSchema::standard()) {
  out << "goals,team,opponent";
  for (const auto& f : schema.features) out << ',' << f.name;
  out << '\n';
  for (const auto& row : rows) {
    out << format_double(row.goals) << ',' << row.team << ',' << row.opponent;
    for (size_t f = 0; f < schema.size(); ++f) {
      out << ',';
      if (schema.numeric(f))
        out << format_double(row.x[f]);
      else
        out << to_string(static_cast<Confederation>(static_cast<int>(row.x[f])));
    }
    out << '\n';
  }
}

inline std::vector<FeatureRow> read_design(std::istream& in, const std::string& source,
                                           const FeatureSchema& schema = FeatureSchema::standard()) {
  CsvReader reader(in, source);
  const size_t c_goals = reader.column("goals");
  const size_t c_team = reader.column("team");
  const size_t c_oppo = reader.column("opponent");
  std::vector<size_t> c_feat;
  for (const auto& f : schema.features) c_feat.push_back(reader.column(f.name));

  std::vector<FeatureRow> rows;
  CsvRow row;
  while (reader.next(row)) {
    const std::string ctx = reader.where();
    FeatureRow r;
    r.goals = parse_double(row.fields[c_goals], ctx);
    r.team = row.fields[c_team];
    r.opponent = row.fields[c_oppo];
    r.x.resize(schema.size());
    for (size_t f = 0; f < schema.size(); ++f) {
      if (schema.numeric(f))
        r.x[f] = parse_double(row.fields[c_feat[f]], ctx);
      else
        r.x[f] = static_cast<double>(
            static_cast<int>(parse_confederation(row.fields[c_feat[f]], ctx)));
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw input_error(source + ": empty design");
  return rows;
}

// --- binary model artifact -------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
               static_cast<char>(v >> 24)};
  out.write(b, 4);
}

inline void put_u64(std::ostream& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

inline void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw input_error("forest artifact: truncated file");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline uint64_t get_u64(std::istream& in) {
  const uint64_t lo = get_u32(in);
  const uint64_t hi = get_u32(in);
  return lo | (hi << 32);
}

inline double get_f64(std::istream& in) {
  const uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline std::string get_str(std::istream& in) {
  const uint32_t len = get_u32(in);
  if (len > (1u << 26)) throw input_error("forest artifact: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw input_error("forest artifact: truncated file");
  return s;
}

}  // namespace detail

inline constexpr uint32_t kForestMagic = 0x4b434652;  // "KCFR"
inline constexpr uint32_t kForestVersion = 1;

// Little-endian binary artifact with the embedded feature schema. The
// provenance string travels with the model but does not affect predictions.
inline void save_forest(std::ostream& out, const Forest& forest,
                        const std::string& provenance = "") {
  namespace d = detail;
  d::put_u32(out, kForestMagic);
  d::put_u32(out, kForestVersion);
  d::put_str(out, provenance);
  d::put_u32(out, static_cast<uint32_t>(forest.schema.size()));
  for (const auto& f : forest.schema.features) {
    d::put_str(out, f.name);
    d::put_u32(out, static_cast<uint32_t>(f.n_categories));
  }
  d::put_u32(out, static_cast<uint32_t>(forest.config.trees));
  d::put_u32(out, static_cast<uint32_t>(forest.config.mtry));
  d::put_u32(out, static_cast<uint32_t>(forest.config.min_node));
  d::put_u64(out, forest.config.seed);
  d::put_u32(out, forest.constant_response ? 1 : 0);
  d::put_u32(out, static_cast<uint32_t>(forest.trees.size()));
  for (const auto& tree : forest.trees) {
    d::put_u32(out, static_cast<uint32_t>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      d::put_u32(out, static_cast<uint32_t>(node.feature));
      d::put_f64(out, node.threshold);
      d::put_u32(out, node.category_mask);
      d::put_u32(out, static_cast<uint32_t>(node.left));
      d::put_u32(out, static_cast<uint32_t>(node.right));
      d::put_f64(out, node.value);
      d::put_u32(out, static_cast<uint32_t>(node.count));
    }
  }
  for (const auto& oob : forest.oob_index) {
    d::put_u32(out, static_cast<uint32_t>(oob.size()));
    for (int i : oob) d::put_u32(out, static_cast<uint32_t>(i));
  }
}

inline Forest load_forest(std::istream& in, std::string* provenance = nullptr) {
  namespace d = detail;
  if (d::get_u32(in) != kForestMagic) throw input_error("forest artifact: bad magic");
  if (d::get_u32(in) != kForestVersion) throw input_error("forest artifact: unknown version");
  const std::string prov = d::get_str(in);
  if (provenance) *provenance = prov;
  Forest forest;
  const uint32_t p = d::get_u32(in);
  for (uint32_t f = 0; f < p; ++f) {
    FeatureSchema::Feature feat;
    feat.name = d::get_str(in);
    feat.n_categories = static_cast<int>(d::get_u32(in));
    forest.schema.features.push_back(std::move(feat));
  }
  forest.config.trees = static_cast<int>(d::get_u32(in));
  forest.config.mtry = static_cast<int>(d::get_u32(in));
  forest.config.min_node = static_cast<int>(d::get_u32(in));
  forest.config.seed = d::get_u64(in);
  forest.constant_response = d::get_u32(in) != 0;
  const uint32_t n_trees = d::get_u32(in);
  forest.trees.resize(n_trees);
  for (auto& tree : forest.trees) {
    tree.nodes.resize(d::get_u32(in));
    for (auto& node : tree.nodes) {
      node.feature = static_cast<int>(d::get_u32(in));
      node.threshold = d::get_f64(in);
      node.category_mask = d::get_u32(in);
      node.left = static_cast<int>(d::get_u32(in));
      node.right = static_cast<int>(d::get_u32(in));
      node.value = d::get_f64(in);
      node.count = static_cast<int>(d::get_u32(in));
    }
  }
  forest.oob_index.resize(n_trees);
  for (auto& oob : forest.oob_index) {
    oob.resize(d::get_u32(in));
    for (auto& i : oob) i = static_cast<int>(d::get_u32(in));
  }
  return forest;
}

inline void save_forest(const std::filesystem::path& path, const Forest& forest,
                        const std::string& provenance = "") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write forest artifact: " + path.string());
  save_forest(out, forest, provenance);
}

inline Forest load_forest(const std::filesystem::path& path, std::string* provenance = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open forest artifact: " + path.string());
  return load_forest(in, provenance);
}

}  // namespace kickcast

#endif
