#include "antclust/engine.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <unordered_map>

#include "antclust/errors.hpp"

namespace antclust {

EngineState::EngineState(const FeatureSet& features_, const Parameters& params_, const RuleSet& rules_)
    : features(&features_), rules(&rules_), params(params_), rng(params_.seed)
{
    params.validate();
    ants.reserve(features->size());
    for (std::size_t i = 0; i < features->size(); ++i) ants.push_back(init_ant(i));
    stats.rule_fires.assign(rules->rules().size(), 0);
}

std::size_t template_meetings_per_ant(std::size_t n, double beta) noexcept
{
    if (n < 2) return 0;
    const auto wanted = static_cast<std::size_t>(std::llround(beta * static_cast<double>(n)));
    return std::min(n - 1, std::max<std::size_t>(1, wanted));
}

std::uint64_t rule_phase_meetings(std::size_t n, double iter_alpha) noexcept
{
    if (n < 2) return 0;
    return static_cast<std::uint64_t>(std::llround(0.5 * iter_alpha * static_cast<double>(n)));
}

namespace {

std::size_t draw_other(Rng& rng, std::size_t n, std::size_t self)
{
    auto j = static_cast<std::size_t>(rng.below(n - 1));
    return j >= self ? j + 1 : j;
}

} // namespace

std::pair<std::size_t, std::size_t> draw_meeting_pair(Rng& rng, std::size_t n)
{
    const auto i = static_cast<std::size_t>(rng.below(n));
    return {i, draw_other(rng, n, i)};
}

void learn_templates(EngineState& state)
{
    const std::size_t n = state.size();
    const std::size_t k = template_meetings_per_ant(n, state.params.beta);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t step = 0; step < k; ++step) {
            const std::size_t j = draw_other(state.rng, n, i);
            const double sim = state.similarity(state.ants[i], state.ants[j]);
            record_meeting_observation(state.ants[i], sim);
            record_meeting_observation(state.ants[j], sim);
            ++state.stats.template_meetings;
        }
    }
}

void meeting_phase(EngineState& state)
{
    const std::size_t n = state.size();
    const std::uint64_t total = rule_phase_meetings(n, state.params.iter_alpha);
    for (std::uint64_t t = 0; t < total; ++t) {
        const auto [i, j] = draw_meeting_pair(state.rng, n);
        Ant& a = state.ants[i];
        Ant& b = state.ants[j];

        const double sim = state.similarity(a, b);
        record_meeting_observation(a, sim);
        record_meeting_observation(b, sim);

        MeetingContext ctx{a, b, sim, acceptance(a.template_threshold, b.template_threshold, sim), state.labels,
                           state.params.update_alpha};
        if (auto fired = state.rules->apply(ctx))
            ++state.stats.rule_fires[*fired];
        else
            ++state.stats.unmatched_meetings;
        ++state.stats.rule_meetings;
    }
}

void nest_shrink(EngineState& state)
{
    struct Tally {
        std::size_t members = 0;
        double m_plus_sum = 0.0;
    };
    std::map<ColonyId, Tally> colonies;
    for (const Ant& ant : state.ants)
        if (ant.label) {
            auto& t = colonies[*ant.label];
            ++t.members;
            t.m_plus_sum += ant.m_plus;
        }
    if (colonies.empty()) return;

    const double n = static_cast<double>(state.size());
    std::map<ColonyId, double> fitness;
    double mean_fitness = 0.0;
    for (const auto& [id, t] : colonies) {
        const double f = (static_cast<double>(t.members) / n) * (t.m_plus_sum / static_cast<double>(t.members));
        fitness[id] = f;
        mean_fitness += f;
    }
    mean_fitness /= static_cast<double>(colonies.size());
    const double cut = state.params.shrink_threshold * mean_fitness;

    for (const auto& [id, f] : fitness)
        if (f < cut) ++state.stats.dissolved_colonies;
    for (Ant& ant : state.ants)
        if (ant.label && fitness[*ant.label] < cut) {
            ant.label.reset();
            ant.m_plus = 0.0;
        }
}

void reassign_unlabeled(EngineState& state)
{
    std::vector<std::size_t> targets;
    std::vector<std::size_t> orphans;
    for (std::size_t i = 0; i < state.size(); ++i) (state.ants[i].label ? targets : orphans).push_back(i);
    if (orphans.empty()) return;

    if (targets.empty()) {
        const ColonyId id = state.labels.fresh();
        for (Ant& ant : state.ants) ant.label = id;
        state.stats.reassigned_ants += orphans.size();
        return;
    }

    std::vector<ColonyId> adopted(orphans.size());
    for (std::size_t k = 0; k < orphans.size(); ++k) {
        const Ant& orphan = state.ants[orphans[k]];
        std::size_t best = targets.front();
        double best_sim = -1.0;
        for (std::size_t t : targets) {
            const double sim = state.similarity(orphan, state.ants[t]);
            if (sim > best_sim) {
                best_sim = sim;
                best = t;
            }
        }
        adopted[k] = *state.ants[best].label;
    }
    for (std::size_t k = 0; k < orphans.size(); ++k) state.ants[orphans[k]].label = adopted[k];
    state.stats.reassigned_ants += orphans.size();
}

ClusteringResult collect_result(const EngineState& state)
{
    ClusteringResult result;
    result.seed_used = state.params.seed;
    result.labels.reserve(state.size());
    std::unordered_map<std::uint64_t, std::int64_t> dense;
    for (const Ant& ant : state.ants) {
        if (!ant.label) throw Error("internal error: unlabeled ant after reassignment");
        auto [it, inserted] = dense.try_emplace(ant.label->value, static_cast<std::int64_t>(dense.size()));
        result.labels.push_back(it->second);
    }
    result.colony_count = dense.size();
    return result;
}

ClusteringResult run_antclust(const FeatureSet& features, const Parameters& params, const RuleSet& rules,
                              EngineStats* stats)
{
    EngineState state(features, params, rules);
    learn_templates(state);
    assert(engine_invariants_hold(state));
    meeting_phase(state);
    assert(engine_invariants_hold(state));
    nest_shrink(state);
    assert(engine_invariants_hold(state));
    reassign_unlabeled(state);
    assert(engine_invariants_hold(state));
    if (stats) *stats = state.stats;
    return collect_result(state);
}

bool engine_invariants_hold(const EngineState& state) noexcept
{
    for (const Ant& ant : state.ants) {
        if (!ant_invariants_hold(ant)) return false;
        if (ant.label && !state.labels.was_issued(*ant.label)) return false;
    }
    return true;
}

} // namespace antclust
