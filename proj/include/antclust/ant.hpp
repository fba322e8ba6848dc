#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace antclust {

/// Identifier of a colony. Issued by LabelAllocator, never zero.
struct ColonyId {
    std::uint64_t value = 0;
    friend auto operator<=>(const ColonyId&, const ColonyId&) = default;
};

/// Monotonic source of fresh colony identifiers.
class LabelAllocator {
public:
    ColonyId fresh() noexcept { return ColonyId{++last_}; }
    std::uint64_t issued() const noexcept { return last_; }
    bool was_issued(ColonyId id) const noexcept { return id.value >= 1 && id.value <= last_; }

private:
    std::uint64_t last_ = 0;
};

/// One agent of the colony: a dataset item plus its recognition state.
///
/// An absent label means the ant belongs to no colony. The template is the
/// acceptance threshold, kept equal to (sim_mean + sim_max) / 2 once the ant
/// has observed at least one meeting.
struct Ant {
    std::size_t genetic_index = 0;
    std::optional<ColonyId> label;
    std::uint64_t age = 0;
    double m = 0.0;
    double m_plus = 0.0;
    double sim_max = 0.0;
    double sim_mean = 0.0;
    double template_threshold = 0.0;
    std::uint64_t meeting_count = 0;

    bool labeled() const noexcept { return label.has_value(); }

    friend bool operator==(const Ant&, const Ant&) = default;
};

/// Run parameters. Defaults are the commonly used values of the method.
struct Parameters {
    double update_alpha = 0.2;    ///< estimator learning rate
    double iter_alpha = 150.0;    ///< meeting phase runs round(0.5 * iter_alpha * N) meetings
    double beta = 0.9;            ///< template learning: round(beta * N) meetings per ant
    double shrink_threshold = 0.5;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when a coefficient is out of its domain.
    void validate() const;
};

/// Output of a run. Labels are dense, numbered from 0 in first-appearance order.
struct ClusteringResult {
    std::vector<std::int64_t> labels;
    std::size_t colony_count = 0;
    std::uint64_t seed_used = 0;
};

Ant init_ant(std::size_t genetic_index) noexcept;

/// Folds one meeting's similarity into the ant's statistics and recomputes its
/// template. Throws InvalidArgument unless 0 <= sim <= 1.
void record_meeting_observation(Ant& ant, double sim);

/// Checks every Ant invariant; returns false on the first violation.
bool ant_invariants_hold(const Ant& ant) noexcept;

} // namespace antclust
