#include "antclust/rules.hpp"

#include <utility>

#include "antclust/errors.hpp"

namespace antclust {

RuleSet::RuleSet(std::string name, std::vector<Rule> rules) : name_(std::move(name)), rules_(std::move(rules))
{
    for (const auto& r : rules_)
        if (!r.guard || !r.action) throw InvalidArgument("rule '" + r.name + "' needs both a guard and an action");
}

std::optional<std::size_t> RuleSet::apply(MeetingContext& ctx) const
{
    for (std::size_t k = 0; k < rules_.size(); ++k) {
        if (rules_[k].guard(ctx)) {
            rules_[k].action(ctx);
            return k;
        }
    }
    return std::nullopt;
}

namespace {

bool same_colony(const MeetingContext& c)
{
    return c.ant_i.label && c.ant_j.label && *c.ant_i.label == *c.ant_j.label;
}

RuleSet make_labroche()
{
    std::vector<Rule> rules;

    rules.push_back({"R1 new colony",
                     [](const MeetingContext& c) { return !c.ant_i.label && !c.ant_j.label && c.accepted; },
                     [](MeetingContext& c) {
                         const ColonyId id = c.labels.fresh();
                         c.ant_i.label = id;
                         c.ant_j.label = id;
                     }});

    rules.push_back({"R2 join colony",
                     [](const MeetingContext& c) { return c.ant_i.labeled() != c.ant_j.labeled() && c.accepted; },
                     [](MeetingContext& c) {
                         if (c.ant_i.label)
                             c.ant_j.label = c.ant_i.label;
                         else
                             c.ant_i.label = c.ant_j.label;
                     }});

    rules.push_back({"R3 mates accept",
                     [](const MeetingContext& c) { return same_colony(c) && c.accepted; },
                     [](MeetingContext& c) {
                         for (Ant* a : {&c.ant_i, &c.ant_j}) {
                             a->m = estimator_increase(a->m, c.update_alpha);
                             a->m_plus = estimator_increase(a->m_plus, c.update_alpha);
                         }
                     }});

    rules.push_back({"R4 mates reject",
                     [](const MeetingContext& c) { return same_colony(c) && !c.accepted; },
                     [](MeetingContext& c) {
                         for (Ant* a : {&c.ant_i, &c.ant_j}) {
                             a->m = estimator_increase(a->m, c.update_alpha);
                             a->m_plus = estimator_decrease(a->m_plus, c.update_alpha);
                         }
                         Ant& loser = c.ant_i.m_plus < c.ant_j.m_plus ? c.ant_i : c.ant_j;
                         loser.label.reset();
                         loser.m_plus = 0.0;
                     }});

    rules.push_back({"R5 colonies meet",
                     [](const MeetingContext& c) {
                         return c.ant_i.label && c.ant_j.label && *c.ant_i.label != *c.ant_j.label && c.accepted;
                     },
                     [](MeetingContext& c) {
                         c.ant_i.m = estimator_decrease(c.ant_i.m, c.update_alpha);
                         c.ant_j.m = estimator_decrease(c.ant_j.m, c.update_alpha);
                         if (c.ant_i.m < c.ant_j.m)
                             c.ant_i.label = c.ant_j.label;
                         else
                             c.ant_j.label = c.ant_i.label;
                     }});

    rules.push_back({"R6 default", [](const MeetingContext&) { return true; }, [](MeetingContext&) {}});

    return RuleSet("labroche", std::move(rules));
}

} // namespace

const RuleSet& labroche_rules()
{
    static const RuleSet rules = make_labroche();
    return rules;
}

std::size_t apply_labroche_rules(MeetingContext& ctx)
{
    // R6 always matches, so a rule always fires
    return *labroche_rules().apply(ctx);
}

const RuleSet& rule_set_by_name(const std::string& name)
{
    if (name == "labroche") return labroche_rules();
    throw InvalidArgument("unknown rule set '" + name + "' (built-in: labroche)");
}

} // namespace antclust
