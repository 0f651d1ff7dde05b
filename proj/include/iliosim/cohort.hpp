#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "iliosim/metrics.hpp"

namespace iliosim::cohort {

enum class Category { Theoretical, Procedural };
enum class ExperienceBucket { Zero, One, OneToFive, MoreThanFive };
enum class Skill { Novice, Skilled };
enum class TFlag { Tminus, Tplus };
enum class PFlag { Pminus, Pplus };
enum class Group { G1, G2 };

std::string_view to_string(Category c);
std::string_view to_string(ExperienceBucket b);
std::string_view to_string(Skill s);
std::string_view to_string(TFlag t);
std::string_view to_string(PFlag p);
std::string_view to_string(Group g);

struct QuestionItem {
  std::string item_id;
  Category category = Category::Theoretical;
  bool correct = false;
};

struct QuestionnaireResponse {
  std::string operator_id;
  std::vector<QuestionItem> items;
  ExperienceBucket experience_bucket = ExperienceBucket::Zero;
};

struct OperatorProfile {
  std::string operator_id;
  Skill skill = Skill::Novice;
  TFlag t_flag = TFlag::Tminus;
  PFlag p_flag = PFlag::Pminus;
  std::optional<Group> group;

  bool operator==(const OperatorProfile&) const = default;
};

/// Which experience buckets count as skilled. Zero and One are always
/// novice, MoreThanFive always skilled.
struct SkillMapping {
  bool one_to_five_skilled = true;
};

/// Flag is positive iff the fraction correct in its category is strictly
/// above 80 %. Throws EmptyCategory if a category has no items.
std::pair<TFlag, PFlag> score_questionnaire(const QuestionnaireResponse& response);

Skill skill_from_experience(ExperienceBucket bucket, SkillMapping mapping = {});

OperatorProfile make_profile(const QuestionnaireResponse& response, SkillMapping mapping = {});

/// Stratifies by (skill, T, P), shuffles each stratum with `seed` and deals
/// members alternately to G1/G2, each stratum starting with whichever group
/// is currently smaller. Deterministic for a fixed seed.
std::vector<OperatorProfile> assign_groups(std::vector<OperatorProfile> profiles, std::uint64_t seed);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p = 1.0;
};

using ContingencyTable = std::vector<std::vector<std::int64_t>>;

/// Pearson chi-square test of homogeneity. Throws DegenerateTable when a row
/// or column sums to zero or the table is smaller than 2x2.
ChiSquareResult chi_square(const ContingencyTable& table);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Upper-tail probability of a chi-square variate with `df` degrees of freedom.
double chi_square_sf(double statistic, int df);

enum class SubPopulation { All, N, D, Tminus, Tplus, Pminus, Pplus };
inline constexpr std::array kSubPopulations{SubPopulation::All,    SubPopulation::N,     SubPopulation::D,
                                            SubPopulation::Tminus, SubPopulation::Tplus, SubPopulation::Pminus,
                                            SubPopulation::Pplus};

std::string_view to_string(SubPopulation s);
bool belongs(const OperatorProfile& p, SubPopulation s);

struct GroupStats {
  int n = 0;
  std::int64_t xray_total = 0;
  std::optional<double> xray_mean;  // unrounded
  std::int64_t iatrogenic_total = 0;
  std::optional<double> iatrogenic_mean;
  std::optional<std::pair<int, int>> iatrogenic_range;
};

struct Comparison {
  SubPopulation population = SubPopulation::All;
  std::string measure;  // "xray" or "iatrogenic"
  ContingencyTable table;
  std::optional<ChiSquareResult> result;
  bool significant = false;
  std::string note;
};

struct GroupReport {
  double alpha = 0.05;
  std::array<std::array<GroupStats, kSubPopulations.size()>, 2> stats{};  // [group][sub-population]
  std::vector<Comparison> comparisons;

  const GroupStats& at(Group g, SubPopulation s) const {
    return stats[static_cast<std::size_t>(g)][static_cast<std::size_t>(s)];
  }
};

/// Per-operator X-ray counts binned into tertiles of the pooled sample,
/// one row per group; empty columns dropped.
ContingencyTable xray_table(const std::vector<int>& g1_counts, const std::vector<int>& g2_counts);

/// Counts of each iatrogenic level (1..5) per group; empty columns dropped.
ContingencyTable iatrogenic_table(const std::vector<int>& g1_levels, const std::vector<int>& g2_levels);

/// Throws MissingMetrics if a grouped operator has no metrics and
/// ValidationError if an operator has no group.
GroupReport cohort_report(const std::vector<OperatorProfile>& profiles,
                          const std::map<std::string, assess::SessionMetrics>& metrics_by_operator,
                          double alpha = 0.05);

nlohmann::json report_to_json(const GroupReport& report);

/// Aligned plain-text rendering; means rounded to two decimals here only.
std::string report_to_table(const GroupReport& report);

struct Roster {
  std::vector<QuestionnaireResponse> responses;
  std::vector<OperatorProfile> profiles;  // grouped
  std::uint64_t seed = 0;
};

/// Parses a roster document and scores it. Operators without a `group`
/// field are assigned with the roster's seed; either all or none may carry one.
Roster roster_from_json(const nlohmann::json& doc);

}  // namespace iliosim::cohort
