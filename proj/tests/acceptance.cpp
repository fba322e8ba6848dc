// Acceptance runner: one pass/fail line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "antclust/antclust.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace antclust;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

std::size_t worker_count()
{
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// ARI of one clustering run on a fresh float dataset.
double float_run(std::size_t clusters, std::size_t tuples, std::uint64_t seed)
{
    Rng data_rng(derive_seed(seed, {0xDA7A, clusters, tuples}));
    const auto data = generate_float_dataset(clusters, tuples, data_rng);
    Parameters p;
    p.seed = seed;
    const auto r = run_antclust(data.features(), p);
    return adjusted_rand_index(data.truth, r.labels);
}

Verdict few_cluster_quality()
{
    const auto start = Clock::now();
    bool ok = true;
    std::string medians;
    for (std::size_t n : {2, 3, 4, 5}) {
        std::vector<double> scores;
        for (std::uint64_t seed = 0; seed < 10; ++seed) scores.push_back(float_run(n, 30, seed));
        const double m = median(scores);
        ok = ok && m >= 0.8;
        medians += fmt(" N=%zu:%.3f", n, m);
    }
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 60.0;
    return {ok, "median ARI" + medians + fmt(" (%.1f s)", elapsed)};
}

Verdict degradation_trend()
{
    const auto start = Clock::now();
    BenchmarkConfig config;
    for (std::size_t n = 2; n <= 30; ++n) config.cluster_counts.push_back(n);
    for (std::size_t t = 3; t <= 90; ++t) config.tuple_counts.push_back(t);
    config.repetitions = 3;
    config.params.seed = 2024;
    config.jobs = worker_count();
    const auto grid = benchmark_grid(config);
    const double low = mean_score_for_clusters(grid, 2, 5);
    const double high = mean_score_for_clusters(grid, 25, 30);
    const double elapsed = seconds_since(start);
    return {low > high && elapsed < 600.0,
            fmt("mean ARI N=2..5 %.3f vs N=25..30 %.3f over %zu runs (%.1f s)", low, high, grid.runs.size(), elapsed)};
}

Verdict tuple_insensitivity()
{
    std::vector<double> means;
    std::string detail = "mean ARI";
    for (std::size_t tuples : {10, 30, 60, 90}) {
        std::vector<double> scores;
        for (std::uint64_t seed = 0; seed < 5; ++seed) scores.push_back(float_run(4, tuples, 100 + seed));
        means.push_back(oracle::list_mean(scores));
        detail += fmt(" t=%zu:%.3f", tuples, means.back());
    }
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    const double range = *hi - *lo;
    return {range <= 0.2, detail + fmt(", range %.3f", range)};
}

Verdict ari_oracle()
{
    Rng rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(199);
        const std::size_t ka = 1 + rng.below(std::min<std::size_t>(n, 12));
        const std::size_t kb = 1 + rng.below(std::min<std::size_t>(n, 12));
        LabelVector a(n), b(n);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = static_cast<std::int64_t>(rng.below(ka));
            b[k] = static_cast<std::int64_t>(rng.below(kb)) - 1;
        }
        worst = std::max(worst, std::abs(adjusted_rand_index(a, b) - oracle::ari_pair_counting(a, b)));
    }
    const double example = adjusted_rand_index(LabelVector{0, 0, 1, 1}, LabelVector{0, 1, 0, 1});
    return {worst <= 1e-12 && example == -0.5, fmt("max deviation %.3g over 1000 pairs, example %.17g", worst, example)};
}

Verdict rule_table()
{
    enum class Labels { None, One, Same, Different };
    struct Case {
        Labels labels;
        bool accepted;
        std::size_t expected;
    };
    // the two mixed-presence orientations both belong to the "one label" row
    const Case cases[] = {
        {Labels::None, true, 0}, {Labels::None, false, 5}, {Labels::One, true, 1},       {Labels::One, false, 5},
        {Labels::Same, true, 2}, {Labels::Same, false, 3}, {Labels::Different, true, 4}, {Labels::Different, false, 5},
    };
    const auto& rules = labroche_rules().rules();
    bool table_ok = rules.size() == 6;
    for (const auto& c : cases) {
        for (bool swap : {false, true}) {
            Ant i = init_ant(0), j = init_ant(1);
            LabelAllocator labels;
            const ColonyId a = labels.fresh(), b = labels.fresh();
            if (c.labels == Labels::One) (swap ? j : i).label = a;
            if (c.labels == Labels::Same) i.label = j.label = a;
            if (c.labels == Labels::Different) {
                i.label = swap ? b : a;
                j.label = swap ? a : b;
            }
            MeetingContext ctx{i, j, 0.5, c.accepted, labels, 0.2};
            std::size_t guards = 0;
            for (std::size_t k = 0; k + 1 < rules.size(); ++k) guards += rules[k].guard(ctx) ? 1 : 0;
            const std::size_t fired = apply_labroche_rules(ctx);
            table_ok = table_ok && guards == (c.expected == 5 ? 0u : 1u) && fired == c.expected;
        }
    }

    Rng rng(5);
    LabelAllocator labels;
    for (int k = 0; k < 3; ++k) labels.fresh();
    bool bounds_ok = true;
    Ant i = init_ant(0), j = init_ant(1);
    for (int trial = 0; trial < 100000; ++trial) {
        if (trial % 1000 == 0) {
            i.m = rng.unit(), i.m_plus = rng.unit();
            j.m = rng.unit(), j.m_plus = rng.unit();
        }
        for (Ant* ant : {&i, &j}) {
            const auto v = rng.below(4);
            if (rng.below(4) == 0) ant->label = v == 0 ? std::nullopt : std::optional<ColonyId>(ColonyId{v});
        }
        MeetingContext ctx{i, j, rng.unit(), rng.below(2) == 1, labels, 0.2};
        apply_labroche_rules(ctx);
        for (const Ant* ant : {&i, &j})
            bounds_ok = bounds_ok && ant->m >= 0.0 && ant->m <= 1.0 && ant->m_plus >= 0.0 && ant->m_plus <= 1.0;
    }
    return {table_ok && bounds_ok, fmt("8 cases x 2 orientations %s, 1e5 fuzzed meetings %s", table_ok ? "ok" : "FAILED",
                                       bounds_ok ? "in bounds" : "OUT OF BOUNDS")};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Verdict determinism()
{
    const fs::path dir = fs::temp_directory_path() / ("antclust_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream out, err;
    auto run = [&](std::vector<std::string> args) { return cli::dispatch(args, out, err); };
    const std::string data = (dir / "data.csv").string();
    int code = run({"gen-data", "--clusters", "5", "--tuples", "30", "--seed", "9", "--out", data});
    code |= run({"cluster", "--csv", data, "--seed", "17", "--out", (dir / "a.csv").string()});
    code |= run({"cluster", "--csv", data, "--seed", "17", "--out", (dir / "b.csv").string()});
    const std::string a = slurp(dir / "a.csv");
    const std::string b = slurp(dir / "b.csv");
    fs::remove_all(dir);
    return {code == 0 && !a.empty() && a == b,
            fmt("exit %d, %zu bytes, %s", code, a.size(), a == b ? "identical" : "DIFFERENT")};
}

Verdict dbscan_baseline()
{
    Rng rng(6);
    const auto data = generate_float_dataset(2, 30, rng);
    const Eigen::MatrixXd dist = distance_from_similarity(data.features().similarity_matrix());
    const auto labels = dbscan_precomputed(dist, kDbscanDefaultEps, kDbscanDefaultMinSamples);
    const auto reference = oracle::dbscan_reachability(dist, kDbscanDefaultEps, kDbscanDefaultMinSamples);
    const double score = adjusted_rand_index(data.truth, labels);
    const bool agrees = labels == reference;
    return {score == 1.0 && agrees, fmt("ARI %.3f, reachability oracle %s", score, agrees ? "agrees" : "DISAGREES")};
}

Verdict descriptor_fixture()
{
    const auto start = Clock::now();
    std::vector<double> scores;
    DescriptorFixtureOptions options;
    options.descriptors_per_item = 20;
    options.intra_bits = 32;
    options.inter_bits = 96;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(derive_seed(seed, {0xDE5C}));
        const auto data = generate_descriptor_fixture(5, 10, options, rng);
        Parameters p;
        p.seed = seed;
        scores.push_back(adjusted_rand_index(data.truth, run_antclust(data.features(), p).labels));
    }
    const double m = median(scores);
    return {m >= 0.9, fmt("median ARI %.3f, min %.3f (%.1f s)", m, *std::min_element(scores.begin(), scores.end()),
                          seconds_since(start))};
}

Verdict meeting_count()
{
    const auto features = FeatureSet({ScalarColumn(Eigen::VectorXd::LinSpaced(100, 0.0, 1.0))});
    Parameters p;
    p.iter_alpha = 150;
    EngineStats stats;
    run_antclust(features, p, labroche_rules(), &stats);
    return {stats.rule_meetings == 7500, fmt("%llu rule-phase meetings", static_cast<unsigned long long>(stats.rule_meetings))};
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"few-cluster quality", few_cluster_quality},
        {"degradation trend", degradation_trend},
        {"tuple-count insensitivity", tuple_insensitivity},
        {"ARI oracle equivalence", ari_oracle},
        {"rule-table exhaustiveness", rule_table},
        {"determinism", determinism},
        {"DBSCAN baseline", dbscan_baseline},
        {"descriptor fixture", descriptor_fixture},
        {"meeting-count contract", meeting_count},
    };
    int failures = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s: %s\n", v.pass ? "PASS" : "FAIL", index++, name, v.detail.c_str());
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
