#include "iliosim/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <fmt/format.h>

#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::cohort {

using json_util::json;

namespace {

constexpr int kRosterFormatVersion = 1;

template <class E, std::size_t N>
E parse_enum(const json& v, const std::array<E, N>& values, std::string_view ctx) {
  if (!v.is_string()) throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be a string");
  const auto text = v.get<std::string>();
  for (E e : values) {
    if (to_string(e) == text) return e;
  }
  throw Error(ErrorCode::ValidationError, std::string(ctx) + ": unknown value '" + text + "'");
}

// Series expansion of P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz); for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

GroupStats stats_for(const std::vector<std::pair<int, int>>& members) {
  GroupStats s;
  s.n = static_cast<int>(members.size());
  if (members.empty()) return s;
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& [xrays, level] : members) {
    s.xray_total += xrays;
    s.iatrogenic_total += level;
    lo = std::min(lo, level);
    hi = std::max(hi, level);
  }
  s.xray_mean = static_cast<double>(s.xray_total) / s.n;
  s.iatrogenic_mean = static_cast<double>(s.iatrogenic_total) / s.n;
  s.iatrogenic_range = std::make_pair(lo, hi);
  return s;
}

ContingencyTable drop_empty_columns(const ContingencyTable& table) {
  ContingencyTable out(table.size());
  if (table.empty()) return out;
  for (std::size_t j = 0; j < table[0].size(); ++j) {
    std::int64_t col = 0;
    for (const auto& row : table) col += row[j];
    if (col == 0) continue;
    for (std::size_t i = 0; i < table.size(); ++i) out[i].push_back(table[i][j]);
  }
  return out;
}

Comparison compare(SubPopulation pop, std::string measure, ContingencyTable table, double alpha) {
  Comparison c;
  c.population = pop;
  c.measure = std::move(measure);
  c.table = std::move(table);
  try {
    c.result = chi_square(c.table);
    c.significant = c.result->p < alpha;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateTable) throw;
    c.note = "not computable: degenerate table";
  }
  return c;
}

std::string fmt_mean(const std::optional<double>& m) { return m ? fmt::format("{:.2f}", *m) : "-"; }

}  // namespace

std::string_view to_string(Category c) { return c == Category::Theoretical ? "Theoretical" : "Procedural"; }

std::string_view to_string(ExperienceBucket b) {
  switch (b) {
    case ExperienceBucket::Zero: return "Zero";
    case ExperienceBucket::One: return "One";
    case ExperienceBucket::OneToFive: return "OneToFive";
    case ExperienceBucket::MoreThanFive: return "MoreThanFive";
  }
  return "Zero";
}

std::string_view to_string(Skill s) { return s == Skill::Novice ? "N" : "D"; }
std::string_view to_string(TFlag t) { return t == TFlag::Tminus ? "T-" : "T+"; }
std::string_view to_string(PFlag p) { return p == PFlag::Pminus ? "P-" : "P+"; }
std::string_view to_string(Group g) { return g == Group::G1 ? "G1" : "G2"; }

std::string_view to_string(SubPopulation s) {
  switch (s) {
    case SubPopulation::All: return "All";
    case SubPopulation::N: return "N";
    case SubPopulation::D: return "D";
    case SubPopulation::Tminus: return "T-";
    case SubPopulation::Tplus: return "T+";
    case SubPopulation::Pminus: return "P-";
    case SubPopulation::Pplus: return "P+";
  }
  return "All";
}

std::pair<TFlag, PFlag> score_questionnaire(const QuestionnaireResponse& response) {
  std::array<int, 2> total{};
  std::array<int, 2> correct{};
  std::set<std::string> seen;
  for (const auto& item : response.items) {
    if (!seen.insert(item.item_id).second) {
      throw Error(ErrorCode::ValidationError, "duplicate item id '" + item.item_id + "'");
    }
    const auto k = static_cast<std::size_t>(item.category);
    ++total[k];
    correct[k] += item.correct ? 1 : 0;
  }
  if (total[0] == 0 || total[1] == 0) {
    throw Error(ErrorCode::EmptyCategory,
                "operator '" + response.operator_id + "' has no " +
                    std::string(total[0] == 0 ? "theoretical" : "procedural") + " items");
  }
  // correct / total > 4/5, in integers.
  auto above = [](int c, int t) { return 5 * c > 4 * t; };
  return {above(correct[0], total[0]) ? TFlag::Tplus : TFlag::Tminus,
          above(correct[1], total[1]) ? PFlag::Pplus : PFlag::Pminus};
}

Skill skill_from_experience(ExperienceBucket bucket, SkillMapping mapping) {
  switch (bucket) {
    case ExperienceBucket::Zero:
    case ExperienceBucket::One: return Skill::Novice;
    case ExperienceBucket::OneToFive: return mapping.one_to_five_skilled ? Skill::Skilled : Skill::Novice;
    case ExperienceBucket::MoreThanFive: return Skill::Skilled;
  }
  return Skill::Novice;
}

OperatorProfile make_profile(const QuestionnaireResponse& response, SkillMapping mapping) {
  const auto [t, p] = score_questionnaire(response);
  return {response.operator_id, skill_from_experience(response.experience_bucket, mapping), t, p, std::nullopt};
}

std::vector<OperatorProfile> assign_groups(std::vector<OperatorProfile> profiles, std::uint64_t seed) {
  if (profiles.size() < 2) throw Error(ErrorCode::ValidationError, "need at least two operators to form groups");
  std::array<std::vector<std::size_t>, 8> strata;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    const auto key = static_cast<std::size_t>(p.skill) * 4 + static_cast<std::size_t>(p.t_flag) * 2 +
                     static_cast<std::size_t>(p.p_flag);
    strata[key].push_back(i);
  }
  // mt19937_64's output sequence is fixed by the standard; distributions are
  // not, so the Fisher-Yates draw below uses raw engine output.
  std::mt19937_64 rng(seed);
  std::array<int, 2> sizes{};
  for (auto& members : strata) {
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng() % i]);
    }
    const std::size_t first = sizes[1] < sizes[0] ? 1 : 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t g = (first + k) % 2;
      profiles[members[k]].group = static_cast<Group>(g);
      ++sizes[g];
    }
  }
  return profiles;
}

ChiSquareResult chi_square(const ContingencyTable& table) {
  if (table.size() < 2 || table[0].size() < 2) {
    throw Error(ErrorCode::DegenerateTable, "contingency table must be at least 2x2");
  }
  const std::size_t cols = table[0].size();
  std::vector<double> row_sum(table.size(), 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != cols) throw Error(ErrorCode::DegenerateTable, "ragged contingency table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (table[i][j] < 0) throw Error(ErrorCode::DegenerateTable, "negative cell count");
      const auto v = static_cast<double>(table[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
      total += v;
    }
  }
  for (double r : row_sum) {
    if (r == 0.0) throw Error(ErrorCode::DegenerateTable, "a row sums to zero");
  }
  for (double c : col_sum) {
    if (c == 0.0) throw Error(ErrorCode::DegenerateTable, "a column sums to zero");
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      const double diff = static_cast<double>(table[i][j]) - expected;
      r.statistic += diff * diff / expected;
    }
  }
  r.df = static_cast<int>((table.size() - 1) * (cols - 1));
  r.p = chi_square_sf(r.statistic, r.df);
  return r;
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error(ErrorCode::ValidationError, "gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_sf(double statistic, int df) {
  if (df <= 0) throw Error(ErrorCode::DegenerateTable, "chi-square needs df >= 1");
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * statistic);
}

bool belongs(const OperatorProfile& p, SubPopulation s) {
  switch (s) {
    case SubPopulation::All: return true;
    case SubPopulation::N: return p.skill == Skill::Novice;
    case SubPopulation::D: return p.skill == Skill::Skilled;
    case SubPopulation::Tminus: return p.t_flag == TFlag::Tminus;
    case SubPopulation::Tplus: return p.t_flag == TFlag::Tplus;
    case SubPopulation::Pminus: return p.p_flag == PFlag::Pminus;
    case SubPopulation::Pplus: return p.p_flag == PFlag::Pplus;
  }
  return false;
}

ContingencyTable xray_table(const std::vector<int>& g1_counts, const std::vector<int>& g2_counts) {
  std::vector<int> pooled = g1_counts;
  pooled.insert(pooled.end(), g2_counts.begin(), g2_counts.end());
  ContingencyTable table(2, std::vector<std::int64_t>(3, 0));
  if (pooled.empty()) return drop_empty_columns(table);
  std::sort(pooled.begin(), pooled.end());
  // Nearest-rank tertile cut points.
  const std::size_t n = pooled.size();
  const int cut1 = pooled[(n + 2) / 3 - 1];
  const int cut2 = pooled[(2 * n + 2) / 3 - 1];
  auto bin = [&](int x) { return x <= cut1 ? 0 : (x <= cut2 ? 1 : 2); };
  for (int x : g1_counts) ++table[0][static_cast<std::size_t>(bin(x))];
  for (int x : g2_counts) ++table[1][static_cast<std::size_t>(bin(x))];
  return drop_empty_columns(table);
}

ContingencyTable iatrogenic_table(const std::vector<int>& g1_levels, const std::vector<int>& g2_levels) {
  ContingencyTable table(2, std::vector<std::int64_t>(5, 0));
  auto add = [&table](std::size_t row, int level) {
    if (level < 1 || level > 5) throw Error(ErrorCode::ValidationError, "iatrogenic level out of range");
    ++table[row][static_cast<std::size_t>(level - 1)];
  };
  for (int l : g1_levels) add(0, l);
  for (int l : g2_levels) add(1, l);
  return drop_empty_columns(table);
}

GroupReport cohort_report(const std::vector<OperatorProfile>& profiles,
                          const std::map<std::string, assess::SessionMetrics>& metrics_by_operator,
                          double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::ValidationError, "alpha must lie in (0, 1)");
  GroupReport report;
  report.alpha = alpha;
  for (const auto& p : profiles) {
    if (!p.group) throw Error(ErrorCode::ValidationError, "operator '" + p.operator_id + "' has no group");
    if (!metrics_by_operator.contains(p.operator_id)) {
      throw Error(ErrorCode::MissingMetrics, "no session metrics for operator '" + p.operator_id + "'");
    }
  }
  for (std::size_t si = 0; si < kSubPopulations.size(); ++si) {
    const SubPopulation sub = kSubPopulations[si];
    std::array<std::vector<std::pair<int, int>>, 2> members;
    for (const auto& p : profiles) {
      if (!belongs(p, sub)) continue;
      const auto& m = metrics_by_operator.at(p.operator_id);
      members[static_cast<std::size_t>(*p.group)].emplace_back(m.xray_count, m.iatrogenic_level);
    }
    std::array<std::vector<int>, 2> xrays;
    std::array<std::vector<int>, 2> levels;
    for (std::size_t g = 0; g < 2; ++g) {
      report.stats[g][si] = stats_for(members[g]);
      for (const auto& [x, l] : members[g]) {
        xrays[g].push_back(x);
        levels[g].push_back(l);
      }
    }
    report.comparisons.push_back(compare(sub, "xray", xray_table(xrays[0], xrays[1]), alpha));
    report.comparisons.push_back(compare(sub, "iatrogenic", iatrogenic_table(levels[0], levels[1]), alpha));
  }
  return report;
}

json report_to_json(const GroupReport& report) {
  json groups = json::object();
  for (const Group g : {Group::G1, Group::G2}) {
    json subs = json::object();
    for (const SubPopulation s : kSubPopulations) {
      const GroupStats& st = report.at(g, s);
      json js = {{"n", st.n}, {"xray_total", st.xray_total}, {"iatrogenic_total", st.iatrogenic_total}};
      js["xray_mean"] = st.xray_mean ? json(*st.xray_mean) : json(nullptr);
      js["iatrogenic_mean"] = st.iatrogenic_mean ? json(*st.iatrogenic_mean) : json(nullptr);
      js["iatrogenic_range"] = st.iatrogenic_range
                                   ? json::array({st.iatrogenic_range->first, st.iatrogenic_range->second})
                                   : json(nullptr);
      subs[std::string(to_string(s))] = std::move(js);
    }
    groups[std::string(to_string(g))] = std::move(subs);
  }
  json comps = json::array();
  for (const auto& c : report.comparisons) {
    json jc = {{"population", to_string(c.population)}, {"measure", c.measure}, {"table", c.table},
               {"significant", c.significant}};
    if (c.result) {
      jc["chi_square"] = {{"statistic", c.result->statistic}, {"df", c.result->df}, {"p", c.result->p}};
    } else {
      jc["chi_square"] = nullptr;
      jc["note"] = c.note;
    }
    comps.push_back(std::move(jc));
  }
  return {{"format_version", 1}, {"alpha", report.alpha}, {"groups", std::move(groups)},
          {"comparisons", std::move(comps)}};
}

std::string report_to_table(const GroupReport& report) {
  std::string out = fmt::format("{:<6}{:<6}{:>4}{:>13}{:>12}{:>13}{:>12}{:>14}\n", "Group", "Sub", "n",
                                "X-ray total", "X-ray mean", "Iatro total", "Iatro mean", "Iatro range");
  for (const Group g : {Group::G1, Group::G2}) {
    for (const SubPopulation s : kSubPopulations) {
      const GroupStats& st = report.at(g, s);
      const std::string range =
          st.iatrogenic_range ? fmt::format("{} to {}", st.iatrogenic_range->first, st.iatrogenic_range->second)
                              : "-";
      out += fmt::format("{:<6}{:<6}{:>4}{:>13}{:>12}{:>13}{:>12}{:>14}\n", to_string(g), to_string(s), st.n,
                         st.xray_total, fmt_mean(st.xray_mean), st.iatrogenic_total, fmt_mean(st.iatrogenic_mean),
                         range);
    }
  }
  out += fmt::format("\nG1 vs G2 chi-square (alpha = {:.2f})\n", report.alpha);
  out += fmt::format("{:<6}{:<12}{:>12}{:>5}{:>12}\n", "Sub", "Measure", "Statistic", "df", "p");
  for (const auto& c : report.comparisons) {
    std::string line =
        c.result ? fmt::format("{:<6}{:<12}{:>12.4f}{:>5}{:>12.5f}  {}", to_string(c.population), c.measure,
                               c.result->statistic, c.result->df, c.result->p, c.significant ? "significant" : "")
                 : fmt::format("{:<6}{:<12}{:>12}{:>5}{:>12}  {}", to_string(c.population), c.measure, "-", "-",
                               "-", c.note);
    line.erase(line.find_last_not_of(' ') + 1);
    out += line + "\n";
  }
  return out;
}

Roster roster_from_json(const json& doc) {
  json_util::check_version(doc, kRosterFormatVersion, "roster");
  Roster roster;
  if (doc.contains("seed")) roster.seed = json_util::get_uint(doc["seed"], "roster.seed");
  SkillMapping mapping;
  if (doc.contains("one_to_five_skilled")) mapping.one_to_five_skilled =
        json_util::get_bool(doc["one_to_five_skilled"], "roster.one_to_five_skilled");
  const json& ops = json_util::require(doc, "operators", "roster");
  if (!ops.is_array()) throw Error(ErrorCode::ValidationError, "roster.operators must be an array");
  std::size_t with_group = 0;
  std::set<std::string> ids;
  for (const auto& o : ops) {
    QuestionnaireResponse r;
    r.operator_id = json_util::get_string(json_util::require(o, "operator_id", "operator"), "operator_id");
    if (!ids.insert(r.operator_id).second) {
      throw Error(ErrorCode::ValidationError, "duplicate operator id '" + r.operator_id + "'");
    }
    r.experience_bucket = parse_enum(json_util::require(o, "experience_bucket", "operator"),
                                     std::array{ExperienceBucket::Zero, ExperienceBucket::One,
                                                ExperienceBucket::OneToFive, ExperienceBucket::MoreThanFive},
                                     "experience_bucket");
    const json& items = json_util::require(o, "items", "operator");
    if (!items.is_array()) throw Error(ErrorCode::ValidationError, "operator.items must be an array");
    for (const auto& it : items) {
      QuestionItem item;
      item.item_id = json_util::get_string(json_util::require(it, "item_id", "item"), "item_id");
      item.category = parse_enum(json_util::require(it, "category", "item"),
                                 std::array{Category::Theoretical, Category::Procedural}, "category");
      item.correct = json_util::get_bool(json_util::require(it, "correct", "item"), "correct");
      r.items.push_back(std::move(item));
    }
    OperatorProfile p = make_profile(r, mapping);
    if (o.contains("group")) {
      p.group = parse_enum(o["group"], std::array{Group::G1, Group::G2}, "group");
      ++with_group;
    }
    roster.responses.push_back(std::move(r));
    roster.profiles.push_back(std::move(p));
  }
  if (with_group != 0 && with_group != roster.profiles.size()) {
    throw Error(ErrorCode::ValidationError, "either every operator or none may carry a group");
  }
  if (with_group == 0) roster.profiles = assign_groups(std::move(roster.profiles), roster.seed);
  return roster;
}

}  // namespace iliosim::cohort
