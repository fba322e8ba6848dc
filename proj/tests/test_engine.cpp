#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>

#include "antclust/engine.hpp"
#include "antclust/evaluation.hpp"

using namespace antclust;

namespace {

FeatureSet scalar_features(std::initializer_list<double> values)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index k = 0;
    for (double x : values) v[k++] = x;
    return FeatureSet({ScalarColumn(v)});
}

FeatureSet line_features(std::size_t n)
{
    return FeatureSet({ScalarColumn(Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 0.0, 1.0))});
}

} // namespace

TEST_CASE("phase meeting counts")
{
    CHECK(template_meetings_per_ant(10, 0.9) == 9);
    CHECK(template_meetings_per_ant(2, 0.9) == 1);
    CHECK(template_meetings_per_ant(1, 0.9) == 0);
    CHECK(template_meetings_per_ant(100, 0.9) == 90);
    CHECK(template_meetings_per_ant(100, 0.001) == 1);
    CHECK(template_meetings_per_ant(100, 5.0) == 99);

    CHECK(rule_phase_meetings(100, 150) == 7500);
    CHECK(rule_phase_meetings(100, 500) == 25000);
    CHECK(rule_phase_meetings(1, 150) == 0);
}

TEST_CASE("learn_templates")
{
    SUBCASE("N = 10")
    {
        const auto fs = line_features(10);
        Parameters p;
        EngineState state(fs, p);
        learn_templates(state);
        CHECK(state.stats.template_meetings == 90);
        std::uint64_t total = 0;
        for (const Ant& a : state.ants) {
            total += a.meeting_count;
            CHECK(a.meeting_count >= 9);
            CHECK(a.template_threshold > 0.0);
            CHECK_FALSE(a.label);
        }
        CHECK(total == 2 * 90);
        CHECK(engine_invariants_hold(state));
    }
    SUBCASE("N = 2")
    {
        const auto fs = line_features(2);
        EngineState state(fs, Parameters{});
        learn_templates(state);
        CHECK(state.stats.template_meetings == 2);
        CHECK(state.ants[0].meeting_count == 2);
    }
    SUBCASE("N = 1")
    {
        const auto fs = line_features(1);
        EngineState state(fs, Parameters{});
        learn_templates(state);
        CHECK(state.stats.template_meetings == 0);
        CHECK(state.ants[0].template_threshold == 0.0);
    }
}

TEST_CASE("meeting_phase runs round(0.5 * alpha * N) meetings")
{
    const auto fs = line_features(100);
    for (double alpha : {150.0, 500.0}) {
        Parameters p;
        p.iter_alpha = alpha;
        EngineState state(fs, p);
        learn_templates(state);
        std::uint64_t age_before = 0;
        for (const Ant& a : state.ants) age_before += a.age;
        meeting_phase(state);
        std::uint64_t age_after = 0;
        for (const Ant& a : state.ants) age_after += a.age;

        const std::uint64_t expected = alpha == 150.0 ? 7500 : 25000;
        CHECK(state.stats.rule_meetings == expected);
        CHECK(age_after - age_before == 2 * expected);
        std::uint64_t fired = state.stats.unmatched_meetings;
        for (auto f : state.stats.rule_fires) fired += f;
        CHECK(fired == expected);
        CHECK(engine_invariants_hold(state));
    }

    const auto single = line_features(1);
    EngineState lone(single, Parameters{});
    meeting_phase(lone);
    CHECK(lone.stats.rule_meetings == 0);
}

TEST_CASE("meeting pairs are uniform over unordered pairs")
{
    constexpr std::size_t n = 10;
    constexpr std::size_t draws = 100000;
    Rng rng(99);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
    for (std::size_t k = 0; k < draws; ++k) {
        auto [i, j] = draw_meeting_pair(rng, n);
        REQUIRE(i != j);
        REQUIRE(i < n);
        REQUIRE(j < n);
        ++counts[{std::min(i, j), std::max(i, j)}];
    }
    CHECK(counts.size() == 45);
    const double p = 1.0 / 45.0;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (const auto& [pair, c] : counts) CHECK(std::abs(static_cast<double>(c) - draws * p) <= 5 * sigma);
}

TEST_CASE("nest_shrink")
{
    auto labelled_state = [](const FeatureSet& fs) { return EngineState(fs, Parameters{}); };

    SUBCASE("fitness 0.30 vs 0.02 with threshold 0.5 dissolves the weak colony")
    {
        const auto fs = line_features(10);
        EngineState state = labelled_state(fs);
        const ColonyId strong = state.labels.fresh();
        const ColonyId weak = state.labels.fresh();
        // 6/10 * 0.5 = 0.30 and 1/10 * 0.2 = 0.02; mean 0.16, cut 0.08
        for (int k = 0; k < 6; ++k) {
            state.ants[k].label = strong;
            state.ants[k].m_plus = 0.5;
        }
        state.ants[6].label = weak;
        state.ants[6].m_plus = 0.2;
        nest_shrink(state);
        for (int k = 0; k < 6; ++k) CHECK(state.ants[k].label == strong);
        CHECK_FALSE(state.ants[6].label);
        CHECK(state.ants[6].m_plus == 0.0);
        CHECK(state.stats.dissolved_colonies == 1);
    }
    SUBCASE("a single colony survives")
    {
        const auto fs = line_features(4);
        EngineState state = labelled_state(fs);
        const ColonyId c = state.labels.fresh();
        state.ants[0].label = state.ants[1].label = c;
        state.ants[0].m_plus = 0.01;
        nest_shrink(state);
        CHECK(state.ants[0].label == c);
        CHECK(state.ants[1].label == c);
    }
    SUBCASE("equal fitness: all survive")
    {
        const auto fs = line_features(4);
        EngineState state = labelled_state(fs);
        const ColonyId a = state.labels.fresh();
        const ColonyId b = state.labels.fresh();
        state.ants[0].label = state.ants[1].label = a;
        state.ants[2].label = state.ants[3].label = b;
        for (auto& ant : state.ants) ant.m_plus = 0.4;
        nest_shrink(state);
        for (auto& ant : state.ants) CHECK(ant.label);
    }
    SUBCASE("no colonies: no-op")
    {
        const auto fs = line_features(3);
        EngineState state = labelled_state(fs);
        nest_shrink(state);
        for (auto& ant : state.ants) CHECK_FALSE(ant.label);
    }
}

TEST_CASE("reassign_unlabeled")
{
    SUBCASE("nearest labeled ant wins, ties to the lowest index")
    {
        const auto fs = scalar_features({0.0, 0.1, 0.9, 1.0, 0.5});
        EngineState state(fs, Parameters{});
        const ColonyId low = state.labels.fresh();
        const ColonyId high = state.labels.fresh();
        state.ants[0].label = low;
        state.ants[3].label = high;
        nest_shrink(state);  // leaves equal-fitness colonies alone
        reassign_unlabeled(state);
        CHECK(state.ants[1].label == low);
        CHECK(state.ants[2].label == high);
        // 0.5 is equidistant from 0.0 and 1.0
        CHECK(state.ants[4].label == low);
        CHECK(state.stats.reassigned_ants == 3);
    }
    SUBCASE("nothing to do")
    {
        const auto fs = scalar_features({0.0, 1.0});
        EngineState state(fs, Parameters{});
        const ColonyId c = state.labels.fresh();
        state.ants[0].label = state.ants[1].label = c;
        reassign_unlabeled(state);
        CHECK(state.stats.reassigned_ants == 0);
    }
    SUBCASE("no labeled ants: one colony for everything")
    {
        const auto fs = scalar_features({0.0, 0.5, 1.0});
        EngineState state(fs, Parameters{});
        reassign_unlabeled(state);
        REQUIRE(state.ants[0].label);
        for (auto& ant : state.ants) CHECK(ant.label == state.ants[0].label);
        CHECK(collect_result(state).colony_count == 1);
    }
}

TEST_CASE("run_antclust")
{
    SUBCASE("single item")
    {
        const auto fs = scalar_features({0.3});
        const auto r = run_antclust(fs, Parameters{});
        CHECK(r.labels == LabelVector{0});
        CHECK(r.colony_count == 1);
    }
    SUBCASE("determinism for fixed seeds")
    {
        Rng rng(5);
        const auto data = generate_float_dataset(4, 20, rng);
        const auto fs = data.features();
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            Parameters p;
            p.seed = seed;
            const auto a = run_antclust(fs, p);
            const auto b = run_antclust(fs, p);
            CHECK(a.labels == b.labels);
            CHECK(a.seed_used == seed);
        }
    }
    SUBCASE("labels are dense in first-appearance order")
    {
        Rng rng(6);
        const auto data = generate_float_dataset(6, 10, rng);
        Parameters p;
        p.seed = 4;
        const auto r = run_antclust(data.features(), p);
        CHECK(r.labels.size() == 60);
        std::int64_t next = 0;
        for (auto l : r.labels) {
            REQUIRE(l <= next);
            if (l == next) ++next;
        }
        CHECK(static_cast<std::size_t>(next) == r.colony_count);
        CHECK(r.colony_count >= 1);
        CHECK(r.colony_count <= 60);
    }
    SUBCASE("{0, 0.01, 0.99, 1}: two colonies for the majority of seeds")
    {
        const auto fs = scalar_features({0.0, 0.01, 0.99, 1.0});
        const LabelVector truth{0, 0, 1, 1};
        int perfect = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Parameters p;
            p.seed = seed;
            const auto r = run_antclust(fs, p);
            if (r.colony_count == 2 && adjusted_rand_index(truth, r.labels) == 1.0) ++perfect;
        }
        CHECK(perfect > 10);
    }
}

TEST_CASE("invariants hold after every phase")
{
    Rng rng(8);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = generate_float_dataset(1 + rng.below(8), 2 + rng.below(20), rng);
        const auto fs = data.features();
        Parameters p;
        p.seed = seed;
        EngineState state(fs, p);
        learn_templates(state);
        REQUIRE(engine_invariants_hold(state));
        meeting_phase(state);
        REQUIRE(engine_invariants_hold(state));
        nest_shrink(state);
        REQUIRE(engine_invariants_hold(state));
        reassign_unlabeled(state);
        REQUIRE(engine_invariants_hold(state));
        for (const Ant& a : state.ants) REQUIRE(a.label);
        const auto r = collect_result(state);
        CHECK(r.colony_count >= 1);
        CHECK(r.colony_count <= state.size());
    }
}

TEST_CASE("engine accepts a custom rule set")
{
    // never does anything: everything ends up in the fallback colony
    RuleSet idle("idle", {});
    const auto fs = line_features(12);
    EngineStats stats;
    const auto r = run_antclust(fs, Parameters{}, idle, &stats);
    CHECK(r.colony_count == 1);
    CHECK(stats.unmatched_meetings == stats.rule_meetings);
}
