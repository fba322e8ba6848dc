#include "antclust/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <map>
#include <numeric>
#include <thread>
#include <utility>

#include <json.hpp>

#include "antclust/engine.hpp"
#include "antclust/errors.hpp"

namespace antclust {

namespace {

using Wide = __int128;

Wide pairs(std::int64_t n) { return static_cast<Wide>(n) * (n - 1) / 2; }

std::string shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

double adjusted_rand_index(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted)
{
    if (truth.size() != predicted.size())
        throw InvalidArgument("label sequences differ in length (" + std::to_string(truth.size()) + " vs " +
                              std::to_string(predicted.size()) + ")");
    if (truth.size() < 2) throw InvalidArgument("adjusted Rand index needs at least two items");

    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> cells;
    std::map<std::int64_t, std::int64_t> rows, cols;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        ++cells[{truth[k], predicted[k]}];
        ++rows[truth[k]];
        ++cols[predicted[k]];
    }

    Wide index = 0, sum_rows = 0, sum_cols = 0;
    for (const auto& [key, n] : cells) index += pairs(n);
    for (const auto& [key, n] : rows) sum_rows += pairs(n);
    for (const auto& [key, n] : cols) sum_cols += pairs(n);
    const Wide total = pairs(static_cast<std::int64_t>(truth.size()));

    // (index - expected) / (max - expected), scaled by 2 * total to stay integral
    const Wide numerator = 2 * index * total - 2 * sum_rows * sum_cols;
    const Wide denominator = (sum_rows + sum_cols) * total - 2 * sum_rows * sum_cols;
    if (denominator == 0) return (index == sum_rows && index == sum_cols) ? 1.0 : 0.0;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

// ---------------------------------------------------------------------------

FeatureSet FloatDataset::features() const
{
    return FeatureSet({ScalarColumn::from_raw(values)});
}

FloatDataset generate_float_dataset(std::size_t n_clusters, std::size_t per_cluster, Rng& rng)
{
    if (n_clusters == 0 || per_cluster == 0) throw InvalidArgument("cluster and tuple counts must be positive");
    FloatDataset data;
    data.values.resize(static_cast<Eigen::Index>(n_clusters * per_cluster));
    data.truth.reserve(n_clusters * per_cluster);
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        const double pivot = static_cast<double>(c + 1);
        for (std::size_t t = 0; t < per_cluster; ++t) {
            data.values[k++] = pivot + rng.uniform(-0.1, 0.1);
            data.truth.push_back(static_cast<std::int64_t>(c));
        }
    }
    return data;
}

// ---------------------------------------------------------------------------

FeatureSet DescriptorDataset::features() const
{
    return FeatureSet({DescriptorColumn(sets)});
}

namespace {

using Bits = std::vector<std::uint8_t>;

Bits random_bits(std::size_t width, Rng& rng)
{
    Bits b(width);
    for (auto& byte : b) byte = static_cast<std::uint8_t>(rng.below(256));
    return b;
}

/// Copies `base` and flips `flips` distinct bits chosen uniformly.
Bits flip_bits(const Bits& base, std::size_t flips, Rng& rng)
{
    const std::size_t n_bits = base.size() * 8;
    std::vector<std::size_t> positions(n_bits);
    std::iota(positions.begin(), positions.end(), 0);
    Bits out = base;
    for (std::size_t k = 0; k < flips; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.below(n_bits - k));
        std::swap(positions[k], positions[pick]);
        out[positions[k] / 8] ^= static_cast<std::uint8_t>(1u << (positions[k] % 8));
    }
    return out;
}

constexpr std::size_t kMaxAttempts = 100000;

} // namespace

DescriptorDataset generate_descriptor_fixture(std::size_t n_clusters, std::size_t per_cluster,
                                              const DescriptorFixtureOptions& options, Rng& rng)
{
    if (n_clusters == 0 || per_cluster == 0) throw InvalidArgument("cluster and tuple counts must be positive");
    if (options.width_bytes == 0 || options.descriptors_per_item == 0)
        throw InvalidArgument("descriptor width and count must be positive");
    const std::size_t n_bits = options.width_bytes * 8;
    // every descriptor stays within radius of its prototype, so intra <= 2 * radius
    const std::size_t radius = options.intra_bits / 2;
    // and keeps inter_bits + radius from foreign prototypes, so inter >= inter_bits
    const std::size_t clearance = options.inter_bits + radius;
    if (clearance > n_bits) throw InvalidArgument("descriptor fixture separation exceeds the descriptor width");

    std::vector<Bits> prototypes;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt == kMaxAttempts) throw InvalidArgument("cannot place descriptor cluster prototypes");
            Bits p = random_bits(options.width_bytes, rng);
            const bool far = std::all_of(prototypes.begin(), prototypes.end(),
                                         [&](const Bits& q) { return hamming_distance(p, q) >= clearance; });
            if (far) {
                prototypes.push_back(std::move(p));
                break;
            }
        }
    }

    DescriptorDataset data;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        for (std::size_t t = 0; t < per_cluster; ++t) {
            std::vector<std::uint8_t> bytes;
            bytes.reserve(options.width_bytes * options.descriptors_per_item);
            for (std::size_t d = 0; d < options.descriptors_per_item; ++d) {
                for (std::size_t attempt = 0;; ++attempt) {
                    if (attempt == kMaxAttempts) throw InvalidArgument("cannot place fixture descriptor");
                    Bits desc = flip_bits(prototypes[c], static_cast<std::size_t>(rng.below(radius + 1)), rng);
                    bool ok = true;
                    for (std::size_t other = 0; other < n_clusters && ok; ++other)
                        if (other != c && hamming_distance(desc, prototypes[other]) < clearance) ok = false;
                    if (ok) {
                        bytes.insert(bytes.end(), desc.begin(), desc.end());
                        break;
                    }
                }
            }
            data.sets.emplace_back(options.width_bytes, std::move(bytes));
            data.truth.push_back(static_cast<std::int64_t>(c));
        }
    }
    return data;
}

// ---------------------------------------------------------------------------

LabelVector dbscan_precomputed(const Eigen::MatrixXd& distances, double eps, std::size_t min_samples)
{
    using Kind = DataError::Kind;
    if (distances.rows() != distances.cols() || distances.rows() == 0)
        throw DataError(Kind::Shape, "distance matrix must be square and non-empty");
    if (!(eps >= 0.0)) throw InvalidArgument("eps must be non-negative");
    const auto n = static_cast<std::size_t>(distances.rows());
    auto at = [&](std::size_t i, std::size_t j) {
        return distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!(at(i, j) >= 0.0)) throw DataError(Kind::Range, "negative distance", i, j);
            if (i == j && at(i, j) != 0.0) throw DataError(Kind::Diagonal, "non-zero self distance", i, j);
            if (j > i && std::abs(at(i, j) - at(j, i)) > SimilarityMatrix::kSymmetryTolerance)
                throw DataError(Kind::Symmetry, "asymmetric distance", i, j);
        }

    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (at(i, j) <= eps) neighbours[i].push_back(j);

    constexpr std::int64_t kUnvisited = -2;
    constexpr std::int64_t kNoise = -1;
    LabelVector labels(n, kUnvisited);
    auto is_core = [&](std::size_t i) { return neighbours[i].size() >= min_samples; };

    std::int64_t cluster = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (labels[seed] != kUnvisited || !is_core(seed)) continue;
        labels[seed] = cluster;
        std::vector<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const std::size_t p = frontier.back();
            frontier.pop_back();
            if (!is_core(p)) continue;
            for (std::size_t q : neighbours[p]) {
                if (labels[q] == kUnvisited) {
                    labels[q] = cluster;
                    frontier.push_back(q);
                }
            }
        }
        ++cluster;
    }
    for (auto& l : labels)
        if (l == kUnvisited) l = kNoise;
    return labels;
}

// ---------------------------------------------------------------------------

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t clusters, std::size_t tuples, std::size_t repetition) noexcept
{
    return derive_seed(base_seed, {clusters, tuples, repetition});
}

BenchmarkRun run_benchmark_cell(const BenchmarkConfig& config, std::size_t clusters, std::size_t tuples,
                                std::size_t repetition)
{
    BenchmarkRun run;
    run.clusters = clusters;
    run.tuples = tuples;
    run.repetition = repetition;
    run.seed = cell_seed(config.params.seed, clusters, tuples, repetition);

    Rng data_rng(derive_seed(run.seed, {0xDA7A}));
    Parameters params = config.params;
    params.seed = run.seed;

    ClusteringResult result;
    LabelVector truth;
    if (config.task == BenchmarkTask::Float) {
        auto data = generate_float_dataset(clusters, tuples, data_rng);
        result = run_antclust(data.features(), params);
        truth = std::move(data.truth);
    } else {
        auto data = generate_descriptor_fixture(clusters, tuples, config.fixture, data_rng);
        result = run_antclust(data.features(), params);
        truth = std::move(data.truth);
    }
    run.colony_count = result.colony_count;
    run.ari = truth.size() >= 2 ? adjusted_rand_index(truth, result.labels) : 1.0;
    return run;
}

BenchmarkGrid benchmark_grid(const BenchmarkConfig& config)
{
    if (config.cluster_counts.empty() || config.tuple_counts.empty() || config.repetitions == 0)
        throw InvalidArgument("benchmark grid needs cluster counts, tuple counts and at least one repetition");
    config.params.validate();

    BenchmarkGrid grid;
    grid.cluster_counts = config.cluster_counts;
    grid.tuple_counts = config.tuple_counts;
    grid.repetitions = config.repetitions;
    grid.base_seed = config.params.seed;

    const std::size_t rows = grid.cluster_counts.size();
    const std::size_t cols = grid.tuple_counts.size();
    const std::size_t total = rows * cols * config.repetitions;
    grid.runs.resize(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t k = next++; k < total && !failed; k = next++) {
            const std::size_t rep = k % config.repetitions;
            const std::size_t col = (k / config.repetitions) % cols;
            const std::size_t row = k / (config.repetitions * cols);
            try {
                grid.runs[k] = run_benchmark_cell(config, grid.cluster_counts[row], grid.tuple_counts[col], rep);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(1, total));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    grid.scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t col = (k / config.repetitions) % cols;
        const std::size_t row = k / (config.repetitions * cols);
        grid.scores(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += grid.runs[k].ari;
    }
    grid.scores /= static_cast<double>(config.repetitions);
    return grid;
}

std::string grid_csv(const BenchmarkGrid& grid)
{
    std::string out = "clusters,tuples,repetition,ari,seed\n";
    for (const auto& r : grid.runs) {
        out += std::to_string(r.clusters) + ',' + std::to_string(r.tuples) + ',' + std::to_string(r.repetition) + ',' +
               shortest(r.ari) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

std::string grid_summary_json(const BenchmarkGrid& grid)
{
    nlohmann::ordered_json doc;
    doc["base_seed"] = grid.base_seed;
    doc["repetitions"] = grid.repetitions;
    doc["cluster_counts"] = grid.cluster_counts;
    doc["tuple_counts"] = grid.tuple_counts;
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < grid.cluster_counts.size(); ++r)
        for (std::size_t c = 0; c < grid.tuple_counts.size(); ++c)
            cells.push_back({{"clusters", grid.cluster_counts[r]},
                             {"tuples", grid.tuple_counts[c]},
                             {"mean_ari", grid.scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))}});
    doc["cells"] = std::move(cells);
    doc["mean_ari"] = grid.scores.size() ? grid.scores.mean() : 0.0;
    return doc.dump(2) + "\n";
}

double mean_score_for_clusters(const BenchmarkGrid& grid, std::size_t lo, std::size_t hi)
{
    double sum = 0.0;
    std::size_t rows = 0;
    for (std::size_t r = 0; r < grid.cluster_counts.size(); ++r)
        if (grid.cluster_counts[r] >= lo && grid.cluster_counts[r] <= hi) {
            sum += grid.scores.row(static_cast<Eigen::Index>(r)).mean();
            ++rows;
        }
    if (rows == 0) throw InvalidArgument("no grid rows in the requested cluster range");
    return sum / static_cast<double>(rows);
}

} // namespace antclust
