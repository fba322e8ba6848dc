#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "antclust/ant.hpp"
#include "antclust/random.hpp"
#include "antclust/rules.hpp"
#include "antclust/similarity.hpp"

namespace antclust {

/// Counters collected while a run progresses.
struct EngineStats {
    std::uint64_t template_meetings = 0;
    std::uint64_t rule_meetings = 0;
    std::vector<std::uint64_t> rule_fires;   ///< indexed like RuleSet::rules()
    std::uint64_t unmatched_meetings = 0;    ///< no guard held
    std::uint64_t dissolved_colonies = 0;
    std::uint64_t reassigned_ants = 0;
};

/// Everything one run mutates. One state per run; a state is never shared
/// between threads.
struct EngineState {
    /// Phase 1: one fresh ant per item. The feature set and rule set must
    /// outlive the state.
    EngineState(const FeatureSet& features, const Parameters& params, const RuleSet& rules = labroche_rules());

    const FeatureSet* features;
    const RuleSet* rules;
    Parameters params;
    std::vector<Ant> ants;
    LabelAllocator labels;
    Rng rng;
    EngineStats stats;

    std::size_t size() const noexcept { return ants.size(); }
    double similarity(const Ant& a, const Ant& b) const { return features->similarity(a.genetic_index, b.genetic_index); }
};

/// Meetings each ant initiates while learning its template:
/// min(N - 1, max(1, round(beta * N))), or 0 when N < 2.
std::size_t template_meetings_per_ant(std::size_t n, double beta) noexcept;

/// Meetings of the rule phase: round(0.5 * iter_alpha * N), or 0 when N < 2.
std::uint64_t rule_phase_meetings(std::size_t n, double iter_alpha) noexcept;

/// Unordered pair of distinct ants, uniform over all N(N-1)/2 pairs.
/// The second index is the ant that yields on rule ties.
std::pair<std::size_t, std::size_t> draw_meeting_pair(Rng& rng, std::size_t n);

/// Phase 2. Every ant meets template_meetings_per_ant() partners drawn
/// uniformly with replacement (never itself); both sides record the
/// similarity. No rules fire.
void learn_templates(EngineState& state);

/// Phase 3. Draws uniform unordered pairs of distinct ants; both record the
/// similarity, then the rule set resolves the meeting.
void meeting_phase(EngineState& state);

/// Phase 4. Colony fitness is (size / N) * mean(m_plus of members). Colonies
/// below shrink_threshold times the mean fitness are dissolved and their
/// members lose label and m_plus.
void nest_shrink(EngineState& state);

/// Phase 5. Each unlabeled ant joins the colony of its most similar labeled
/// ant (ties to the lowest index). Targets are the ants labeled when the phase
/// starts. If no ant is labeled, everything becomes one colony.
void reassign_unlabeled(EngineState& state);

/// Dense labels in first-appearance order. Every ant must be labeled.
ClusteringResult collect_result(const EngineState& state);

/// Runs all five phases.
ClusteringResult run_antclust(const FeatureSet& features, const Parameters& params,
                              const RuleSet& rules = labroche_rules(), EngineStats* stats = nullptr);

/// Ant invariants for every ant, plus every present label issued by the allocator.
bool engine_invariants_hold(const EngineState& state) noexcept;

} // namespace antclust
