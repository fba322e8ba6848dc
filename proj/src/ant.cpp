#include "antclust/ant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "antclust/errors.hpp"

namespace antclust {

void Parameters::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidArgument(std::string("invalid parameter: ") + what);
    };
    require(update_alpha > 0.0 && update_alpha < 1.0, "update_alpha must lie in (0, 1)");
    require(iter_alpha > 0.0 && std::isfinite(iter_alpha), "iter_alpha must be positive");
    require(beta > 0.0 && std::isfinite(beta), "beta must be positive");
    require(shrink_threshold > 0.0 && shrink_threshold <= 1.0, "shrink_threshold must lie in (0, 1]");
}

Ant init_ant(std::size_t genetic_index) noexcept
{
    Ant ant;
    ant.genetic_index = genetic_index;
    return ant;
}

void record_meeting_observation(Ant& ant, double sim)
{
    if (!(sim >= 0.0 && sim <= 1.0))
        throw InvalidArgument("invalid similarity " + std::to_string(sim) + ", expected a value in [0, 1]");

    ++ant.meeting_count;
    ++ant.age;
    ant.sim_max = std::max(ant.sim_max, sim);
    ant.sim_mean += (sim - ant.sim_mean) / static_cast<double>(ant.meeting_count);
    // rounding can push the running mean a hair past the max
    ant.sim_mean = std::clamp(ant.sim_mean, 0.0, ant.sim_max);
    ant.template_threshold = 0.5 * (ant.sim_mean + ant.sim_max);
}

bool ant_invariants_hold(const Ant& ant) noexcept
{
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(ant.m) || !unit(ant.m_plus) || !unit(ant.sim_max) || !unit(ant.sim_mean) ||
        !unit(ant.template_threshold))
        return false;
    if (ant.age < ant.meeting_count) return false;
    if (ant.meeting_count > 0) {
        if (ant.sim_mean > ant.sim_max) return false;
        if (std::abs(ant.template_threshold - 0.5 * (ant.sim_mean + ant.sim_max)) > 1e-12) return false;
    }
    if (ant.label && ant.label->value == 0) return false;
    return true;
}

} // namespace antclust
