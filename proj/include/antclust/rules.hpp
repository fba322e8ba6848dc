#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "antclust/ant.hpp"

namespace antclust {

/// The two ants of one meeting plus everything a rule may read or change.
struct MeetingContext {
    Ant& ant_i;
    Ant& ant_j;
    double sim;
    bool accepted;
    LabelAllocator& labels;
    double update_alpha;
};

/// True iff sim strictly exceeds both templates.
constexpr bool acceptance(double template_i, double template_j, double sim) noexcept
{
    return sim > template_i && sim > template_j;
}

/// x <- (1 - alpha) x + alpha
constexpr double estimator_increase(double x, double update_alpha) noexcept
{
    return (1.0 - update_alpha) * x + update_alpha;
}

/// x <- (1 - alpha) x
constexpr double estimator_decrease(double x, double update_alpha) noexcept
{
    return (1.0 - update_alpha) * x;
}

struct Rule {
    std::string name;
    std::function<bool(const MeetingContext&)> guard;
    std::function<void(MeetingContext&)> action;
};

/// Ordered list of rules. On each meeting only the first rule whose guard
/// holds fires; when no guard holds the meeting changes nothing.
///
/// Rule sets are immutable once built and may be shared between runs.
class RuleSet {
public:
    RuleSet(std::string name, std::vector<Rule> rules);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }

    /// Index of the rule that fired, or nullopt if none matched.
    std::optional<std::size_t> apply(MeetingContext& ctx) const;

private:
    std::string name_;
    std::vector<Rule> rules_;
};

/// The six meeting rules R1..R6 of the original method, in that order.
///
///  R1  both unlabeled, accepted          -> both join a fresh colony
///  R2  exactly one unlabeled, accepted   -> it joins the other's colony
///  R3  same colony, accepted             -> increase m, m_plus of both
///  R4  same colony, rejected             -> increase m, decrease m_plus of both;
///                                           lower m_plus leaves the colony
///  R5  different colonies, accepted      -> decrease m of both; lower m
///                                           joins the other's colony
///  R6  anything else                     -> nothing
///
/// Comparisons in R4 and R5 use the decreased values; on a tie ant_j is the
/// one that moves.
const RuleSet& labroche_rules();

/// Applies labroche_rules() and returns the fired rule index (0 = R1 ... 5 = R6).
std::size_t apply_labroche_rules(MeetingContext& ctx);

/// Looks up a built-in rule set by name. Throws InvalidArgument if unknown.
const RuleSet& rule_set_by_name(const std::string& name);

} // namespace antclust
