#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace fm::pii {

struct Assertion;
struct PIIRecord;

/// Predicates whose assertions carry no informational weight about their
/// referents: reflexive identity statements and analytic truths (things true
/// of every human being).
struct TrivialityRules {
  std::set<std::string> identity_predicates;
  std::set<std::string> analytic_predicates;

  friend bool operator==(const TrivialityRules&, const TrivialityRules&) = default;
};

const TrivialityRules& default_triviality_rules();

/// True when the assertion is a reflexive identity (identity predicate, all
/// arguments textually equal, at least two of them) or its predicate is
/// analytic.
bool is_trivial(const Assertion& a, const TrivialityRules& rules);

enum class Handling { Collect, Process, Disclose, Store, Transfer };
enum class Level { None, Low, Moderate, High };

std::string_view handling_name(Handling h);
std::optional<Handling> handling_from_name(std::string_view name);
std::string_view level_name(Level l);
std::optional<Level> level_from_name(std::string_view name);

/// Sensitivity is a property of (what kind of fact, what is done with it),
/// not of the fact alone. category_map sends predicates to categories,
/// `table` scores category x handling, anything unmapped falls back to
/// default_level.
struct SensitivityPolicy {
  std::map<std::string, std::string> category_map;
  std::map<std::pair<std::string, Handling>, Level> table;
  Level default_level = Level::Low;

  friend bool operator==(const SensitivityPolicy&, const SensitivityPolicy&) = default;
};

const SensitivityPolicy& default_sensitivity_policy();

struct SensitivityResult {
  Level level = Level::None;
  std::string category;
  std::optional<std::string> warning;  // set when the predicate was unmapped

  friend bool operator==(const SensitivityResult&, const SensitivityResult&) = default;
};

/// Scores one classified assertion under a handling mode. Trivial or
/// non-personal records score None regardless of the table.
SensitivityResult sensitivity(const PIIRecord& record, Handling h,
                              const SensitivityPolicy& policy);

}  // namespace fm::pii
