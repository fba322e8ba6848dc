#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "antclust/errors.hpp"

namespace antclust {

// ---------------------------------------------------------------------------
// Scalar features
// ---------------------------------------------------------------------------

/// 1 - |x - y| on features already scaled into [0, 1].
template <typename Scalar>
Scalar sim_scalar(Scalar x, Scalar y)
{
    if (!(x >= Scalar(0) && x <= Scalar(1)) || !(y >= Scalar(0) && y <= Scalar(1)))
        throw InvalidArgument("invalid feature: scalar similarity expects values in [0, 1]");
    return Scalar(1) - std::abs(x - y);
}

/// Min-max scaling into [0, 1]. A constant column maps to 0.5 everywhere.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
normalize_scalar_features(const Eigen::MatrixBase<Derived>& column)
{
    using Scalar = typename Derived::Scalar;
    if (column.size() == 0) throw InvalidArgument("cannot normalize an empty feature column");
    const Scalar lo = column.minCoeff();
    const Scalar hi = column.maxCoeff();
    if (!(hi > lo))
        return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(column.size(), Scalar(0.5));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = ((column.reshaped().array() - lo) / (hi - lo)).matrix();
    // (v - lo) / (hi - lo) can land 1 ulp outside [0, 1]
    return out.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
}

/// Arithmetic mean of per-feature similarities.
template <typename Derived>
typename Derived::Scalar aggregate_similarity(const Eigen::MatrixBase<Derived>& sims)
{
    using Scalar = typename Derived::Scalar;
    if (sims.size() == 0) throw InvalidArgument("configuration error: no similarity features to aggregate");
    if ((sims.array() < Scalar(0)).any() || (sims.array() > Scalar(1)).any())
        throw InvalidArgument("invalid similarity: per-feature similarities must lie in [0, 1]");
    return sims.sum() / static_cast<Scalar>(sims.size());
}

inline double aggregate_similarity(std::span<const double> sims)
{
    return aggregate_similarity(Eigen::Map<const Eigen::VectorXd>(sims.data(), static_cast<Eigen::Index>(sims.size())));
}

/// A column of scalar features, validated to lie in [0, 1].
class ScalarColumn {
public:
    explicit ScalarColumn(Eigen::VectorXd normalized);

    /// Scales raw values with normalize_scalar_features first.
    static ScalarColumn from_raw(const Eigen::VectorXd& raw) { return ScalarColumn(normalize_scalar_features(raw)); }

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double similarity(std::size_t i, std::size_t j) const noexcept
    {
        return 1.0 - std::abs(values_[static_cast<Eigen::Index>(i)] - values_[static_cast<Eigen::Index>(j)]);
    }

private:
    Eigen::VectorXd values_;
};

// ---------------------------------------------------------------------------
// Binary descriptors
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDefaultDescriptorWidth = 32;

/// Number of differing bits between two equally sized byte strings.
std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;

/// The binary descriptors extracted from one item, stored back to back.
class DescriptorSet {
public:
    /// bytes.size() must be a non-zero multiple of width_bytes.
    DescriptorSet(std::size_t width_bytes, std::vector<std::uint8_t> bytes);

    std::size_t width_bytes() const noexcept { return width_; }
    std::size_t count() const noexcept { return bytes_.size() / width_; }
    std::span<const std::uint8_t> descriptor(std::size_t k) const noexcept
    {
        return {bytes_.data() + k * width_, width_};
    }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;

private:
    std::size_t width_;
    std::vector<std::uint8_t> bytes_;
};

/// 1 - d_min / (8 * width), d_min the smallest Hamming distance over all
/// cross pairs. Throws DataError(Width) when the widths differ.
double sim_descriptor_sets(const DescriptorSet& a, const DescriptorSet& b);

class DescriptorColumn {
public:
    explicit DescriptorColumn(std::vector<DescriptorSet> sets);

    std::size_t size() const noexcept { return sets_.size(); }
    const std::vector<DescriptorSet>& sets() const noexcept { return sets_; }
    double similarity(std::size_t i, std::size_t j) const { return sim_descriptor_sets(sets_[i], sets_[j]); }

private:
    std::vector<DescriptorSet> sets_;
};

// ---------------------------------------------------------------------------
// Precomputed similarities
// ---------------------------------------------------------------------------

/// Square similarity matrix: symmetric, unit diagonal, entries in [0, 1].
class SimilarityMatrix {
public:
    static constexpr double kSymmetryTolerance = 1e-9;

    /// Validates and stores the exact symmetric part (a_ij + a_ji) / 2.
    /// Throws DataError carrying the offending cell.
    explicit SimilarityMatrix(const Eigen::MatrixXd& values);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd values_;
};

class MatrixColumn {
public:
    explicit MatrixColumn(std::shared_ptr<const SimilarityMatrix> matrix);

    std::size_t size() const noexcept { return matrix_->size(); }
    const SimilarityMatrix& matrix() const noexcept { return *matrix_; }
    double similarity(std::size_t i, std::size_t j) const noexcept { return (*matrix_)(i, j); }

private:
    std::shared_ptr<const SimilarityMatrix> matrix_;
};

// ---------------------------------------------------------------------------
// Feature sets
// ---------------------------------------------------------------------------

using FeatureColumn = std::variant<ScalarColumn, DescriptorColumn, MatrixColumn>;

/// All feature columns of a dataset. Sim(i, j) is the mean of the per-column
/// similarities.
class FeatureSet {
public:
    /// Requires at least one column, all of the same non-zero length.
    explicit FeatureSet(std::vector<FeatureColumn> columns);

    std::size_t size() const noexcept { return size_; }
    const std::vector<FeatureColumn>& columns() const noexcept { return columns_; }

    double similarity(std::size_t i, std::size_t j) const;

    /// Full n x n similarity matrix.
    Eigen::MatrixXd similarity_matrix() const;

private:
    std::vector<FeatureColumn> columns_;
    std::size_t size_ = 0;
};

inline double pairwise_similarity(const FeatureSet& features, std::size_t i, std::size_t j)
{
    return features.similarity(i, j);
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Text format: first line n, then n lines of n whitespace-separated decimals.
SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path);
SimilarityMatrix parse_similarity_matrix(const std::string& text);
std::string format_similarity_matrix(const Eigen::MatrixXd& values);

/// Reads either the binary "ADSC" container or the hex text form (one line per
/// item, descriptors as hex strings separated by blanks). The format is
/// detected from the leading magic bytes.
std::vector<DescriptorSet> load_descriptor_sets(const std::filesystem::path& path);
std::vector<DescriptorSet> parse_descriptor_container(std::span<const std::uint8_t> bytes);
std::vector<DescriptorSet> parse_descriptor_hex(const std::string& text);

std::vector<std::uint8_t> encode_descriptor_container(std::span<const DescriptorSet> sets);
std::string encode_descriptor_hex(std::span<const DescriptorSet> sets);

/// CSV with one row per item and one column per scalar feature. A first row
/// that does not parse as numbers is treated as a header. Each column is
/// min-max normalized into its own ScalarColumn.
std::vector<ScalarColumn> load_scalar_csv(const std::filesystem::path& path);
std::vector<ScalarColumn> parse_scalar_csv(const std::string& text);

} // namespace antclust
