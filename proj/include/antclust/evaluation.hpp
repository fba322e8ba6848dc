#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "antclust/ant.hpp"
#include "antclust/random.hpp"
#include "antclust/similarity.hpp"

namespace antclust {

using LabelVector = std::vector<std::int64_t>;

/// Adjusted Rand Index from the contingency table of two labelings.
///
/// Labels are arbitrary integers (DBSCAN noise -1 is an ordinary label). When
/// both partitions are trivial the chance correction is undefined; the score
/// is then 1 if the partitions put the same pairs together and 0 otherwise.
double adjusted_rand_index(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted);

/// Items scattered uniformly within +-0.1 of integer pivots 1..n_clusters.
struct FloatDataset {
    Eigen::VectorXd values;
    LabelVector truth;

    /// One scalar column, min-max normalized.
    FeatureSet features() const;
};

FloatDataset generate_float_dataset(std::size_t n_clusters, std::size_t per_cluster, Rng& rng);

/// Planted clusters of binary descriptors. Any two descriptors of the same
/// cluster differ in at most intra_bits bits, any two of different clusters
/// in at least inter_bits bits.
struct DescriptorFixtureOptions {
    std::size_t width_bytes = kDefaultDescriptorWidth;
    std::size_t descriptors_per_item = 20;
    std::size_t intra_bits = 32;
    std::size_t inter_bits = 96;
};

struct DescriptorDataset {
    std::vector<DescriptorSet> sets;
    LabelVector truth;

    FeatureSet features() const;
};

DescriptorDataset generate_descriptor_fixture(std::size_t n_clusters, std::size_t per_cluster,
                                              const DescriptorFixtureOptions& options, Rng& rng);

/// Elementwise 1 - s.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
distance_from_similarity(const Eigen::MatrixBase<Derived>& similarity)
{
    return (typename Derived::Scalar(1) - similarity.array()).matrix();
}

/// DBSCAN on a precomputed distance matrix.
///
/// A point is core when at least min_samples points (itself included) lie
/// within eps. Clusters grow from core points in index order; border points
/// join the first cluster that reaches them; the rest are noise (-1).
/// Throws DataError unless the matrix is square, symmetric, non-negative and
/// zero on the diagonal.
LabelVector dbscan_precomputed(const Eigen::MatrixXd& distances, double eps, std::size_t min_samples);

inline constexpr double kDbscanDefaultEps = 0.33;
inline constexpr std::size_t kDbscanDefaultMinSamples = 2;

// ---------------------------------------------------------------------------
// Benchmark grid
// ---------------------------------------------------------------------------

enum class BenchmarkTask { Float, Descriptor };

struct BenchmarkConfig {
    BenchmarkTask task = BenchmarkTask::Float;
    std::vector<std::size_t> cluster_counts;
    std::vector<std::size_t> tuple_counts;
    std::size_t repetitions = 1;
    Parameters params;            ///< params.seed is the base seed
    std::size_t jobs = 1;
    DescriptorFixtureOptions fixture;
};

struct BenchmarkRun {
    std::size_t clusters = 0;
    std::size_t tuples = 0;
    std::size_t repetition = 0;
    double ari = 0.0;
    std::uint64_t seed = 0;
    std::size_t colony_count = 0;
};

struct BenchmarkGrid {
    std::vector<std::size_t> cluster_counts;
    std::vector<std::size_t> tuple_counts;
    std::size_t repetitions = 0;
    std::uint64_t base_seed = 0;
    Eigen::MatrixXd scores;          ///< mean ARI, rows = clusters, cols = tuples
    std::vector<BenchmarkRun> runs;  ///< ordered by (clusters, tuples, repetition)
};

/// Seed of one grid cell repetition; depends only on its coordinates.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t clusters, std::size_t tuples, std::size_t repetition) noexcept;

/// Generates the cell's dataset, clusters it and scores it against the truth.
BenchmarkRun run_benchmark_cell(const BenchmarkConfig& config, std::size_t clusters, std::size_t tuples,
                                std::size_t repetition);

/// Runs every cell, spreading repetitions over config.jobs worker threads.
/// The result does not depend on the number of jobs.
BenchmarkGrid benchmark_grid(const BenchmarkConfig& config);

/// "clusters,tuples,repetition,ari,seed" rows.
std::string grid_csv(const BenchmarkGrid& grid);

/// JSON summary with the mean ARI per cell.
std::string grid_summary_json(const BenchmarkGrid& grid);

/// Mean of grid.scores over the rows whose cluster count lies in [lo, hi].
double mean_score_for_clusters(const BenchmarkGrid& grid, std::size_t lo, std::size_t hi);

} // namespace antclust
