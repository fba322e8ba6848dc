#include "antclust/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace antclust {

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Kind::Parse, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool parse_double(std::string_view token, double& out)
{
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

bool blank(std::string_view line)
{
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::uint32_t read_u32_le(std::span<const std::uint8_t> bytes, std::size_t offset)
{
    return static_cast<std::uint32_t>(bytes[offset]) | (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) | (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

void write_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

constexpr char kMagic[4] = {'A', 'D', 'S', 'C'};

} // namespace

// ---------------------------------------------------------------------------

ScalarColumn::ScalarColumn(Eigen::VectorXd normalized) : values_(std::move(normalized))
{
    if (values_.size() == 0) throw InvalidArgument("scalar column is empty");
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0))
            throw InvalidArgument("invalid feature: value " + std::to_string(values_[i]) + " of item " +
                                  std::to_string(i) + " is outside [0, 1]");
}

// ---------------------------------------------------------------------------

std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept
{
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t bits = 0;
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        std::uint64_t x, y;
        std::memcpy(&x, a.data() + k, 8);
        std::memcpy(&y, b.data() + k, 8);
        bits += static_cast<std::size_t>(std::popcount(x ^ y));
    }
    for (; k < n; ++k) bits += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(a[k] ^ b[k])));
    return bits;
}

DescriptorSet::DescriptorSet(std::size_t width_bytes, std::vector<std::uint8_t> bytes)
    : width_(width_bytes), bytes_(std::move(bytes))
{
    if (width_ == 0) throw DataError(DataError::Kind::Width, "descriptor width must be positive");
    if (bytes_.empty()) throw DataError(DataError::Kind::Empty, "descriptor set has no descriptors");
    if (bytes_.size() % width_ != 0)
        throw DataError(DataError::Kind::Width, "descriptor bytes are not a multiple of the width");
}

double sim_descriptor_sets(const DescriptorSet& a, const DescriptorSet& b)
{
    if (a.width_bytes() != b.width_bytes())
        throw DataError(DataError::Kind::Width, "incompatible descriptors: widths " + std::to_string(a.width_bytes()) +
                                                    " and " + std::to_string(b.width_bytes()) + " bytes");
    const std::size_t max_bits = 8 * a.width_bytes();
    std::size_t best = max_bits;
    for (std::size_t p = 0; p < a.count() && best > 0; ++p)
        for (std::size_t q = 0; q < b.count(); ++q) {
            best = std::min(best, hamming_distance(a.descriptor(p), b.descriptor(q)));
            if (best == 0) break;
        }
    return 1.0 - static_cast<double>(best) / static_cast<double>(max_bits);
}

DescriptorColumn::DescriptorColumn(std::vector<DescriptorSet> sets) : sets_(std::move(sets))
{
    if (sets_.empty()) throw InvalidArgument("descriptor column is empty");
    for (std::size_t i = 1; i < sets_.size(); ++i)
        if (sets_[i].width_bytes() != sets_[0].width_bytes())
            throw DataError(DataError::Kind::Width, "item " + std::to_string(i) + " has descriptor width " +
                                                        std::to_string(sets_[i].width_bytes()) + ", expected " +
                                                        std::to_string(sets_[0].width_bytes()));
}

// ---------------------------------------------------------------------------

SimilarityMatrix::SimilarityMatrix(const Eigen::MatrixXd& values)
{
    using Kind = DataError::Kind;
    if (values.rows() != values.cols())
        throw DataError(Kind::Shape, "similarity matrix is " + std::to_string(values.rows()) + "x" +
                                         std::to_string(values.cols()) + ", expected square");
    if (values.rows() == 0) throw DataError(Kind::Shape, "similarity matrix is empty");

    const auto n = values.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = values(i, j);
            const auto r = static_cast<std::size_t>(i);
            const auto c = static_cast<std::size_t>(j);
            if (!(v >= 0.0 && v <= 1.0))
                throw DataError(Kind::Range, "similarity " + std::to_string(v) + " outside [0, 1]", r, c);
            if (i == j && v != 1.0)
                throw DataError(Kind::Diagonal, "diagonal similarity " + std::to_string(v) + " is not 1", r, c);
            if (j > i && std::abs(v - values(j, i)) > kSymmetryTolerance)
                throw DataError(Kind::Symmetry, "asymmetric similarity (" + std::to_string(v) + " vs " +
                                                    std::to_string(values(j, i)) + ")", r, c);
        }
    values_ = (values + values.transpose()) * 0.5;
}

MatrixColumn::MatrixColumn(std::shared_ptr<const SimilarityMatrix> matrix) : matrix_(std::move(matrix))
{
    if (!matrix_) throw InvalidArgument("matrix column has no matrix");
}

// ---------------------------------------------------------------------------

FeatureSet::FeatureSet(std::vector<FeatureColumn> columns) : columns_(std::move(columns))
{
    if (columns_.empty()) throw InvalidArgument("configuration error: at least one feature column is required");
    size_ = std::visit([](const auto& c) { return c.size(); }, columns_.front());
    for (std::size_t k = 1; k < columns_.size(); ++k) {
        const auto n = std::visit([](const auto& c) { return c.size(); }, columns_[k]);
        if (n != size_)
            throw DataError(DataError::Kind::Shape, "feature column " + std::to_string(k) + " has " +
                                                        std::to_string(n) + " items, expected " +
                                                        std::to_string(size_));
    }
}

double FeatureSet::similarity(std::size_t i, std::size_t j) const
{
    if (i >= size_ || j >= size_) throw InvalidArgument("item index out of range");
    double sum = 0.0;
    for (const auto& column : columns_) sum += std::visit([&](const auto& c) { return c.similarity(i, j); }, column);
    return sum / static_cast<double>(columns_.size());
}

Eigen::MatrixXd FeatureSet::similarity_matrix() const
{
    const auto n = static_cast<Eigen::Index>(size_);
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = similarity(static_cast<std::size_t>(i), static_cast<std::size_t>(i));
        for (Eigen::Index j = i + 1; j < n; ++j)
            out(i, j) = out(j, i) = similarity(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    return out;
}

// ---------------------------------------------------------------------------

SimilarityMatrix parse_similarity_matrix(const std::string& text)
{
    using Kind = DataError::Kind;
    auto lines = split_lines(text);
    while (!lines.empty() && blank(lines.back())) lines.pop_back();
    if (lines.empty()) throw DataError(Kind::Parse, "similarity matrix file is empty");

    const auto header = split_ws(lines.front());
    std::size_t n = 0;
    if (header.size() != 1 ||
        std::from_chars(header[0].data(), header[0].data() + header[0].size(), n).ec != std::errc() || n == 0)
        throw DataError(Kind::Parse, "first line must hold the positive item count");
    if (lines.size() - 1 != n)
        throw DataError(Kind::Shape, "expected " + std::to_string(n) + " matrix rows, found " +
                                         std::to_string(lines.size() - 1));

    Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const auto tokens = split_ws(lines[r + 1]);
        if (tokens.size() != n)
            throw DataError(Kind::Shape, "row " + std::to_string(r) + " has " + std::to_string(tokens.size()) +
                                             " entries, expected " + std::to_string(n));
        for (std::size_t c = 0; c < n; ++c) {
            double v = 0.0;
            if (!parse_double(tokens[c], v))
                throw DataError(Kind::Parse, "cannot parse '" + std::string(tokens[c]) + "'", r, c);
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return SimilarityMatrix(values);
}

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path)
{
    return parse_similarity_matrix(read_file(path));
}

std::string format_similarity_matrix(const Eigen::MatrixXd& values)
{
    std::ostringstream out;
    out.precision(17);
    out << values.rows() << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? " " : "") << values(i, j);
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

std::vector<DescriptorSet> parse_descriptor_container(std::span<const std::uint8_t> bytes)
{
    using Kind = DataError::Kind;
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataError(Kind::Format, "not a descriptor container (missing ADSC header)");
    const std::uint32_t items = read_u32_le(bytes, 4);
    const std::uint32_t width = read_u32_le(bytes, 8);
    if (width == 0) throw DataError(Kind::Width, "descriptor width must be positive");

    std::vector<DescriptorSet> sets;
    sets.reserve(items);
    std::size_t offset = 12;
    for (std::uint32_t item = 0; item < items; ++item) {
        if (offset + 4 > bytes.size())
            throw DataError(Kind::Truncated, "container ends before item " + std::to_string(item));
        const std::uint32_t count = read_u32_le(bytes, offset);
        offset += 4;
        if (count == 0) throw DataError(Kind::Empty, "item " + std::to_string(item) + " has zero descriptors");
        const std::size_t payload = static_cast<std::size_t>(count) * width;
        if (bytes.size() - offset < payload)
            throw DataError(Kind::Truncated, "item " + std::to_string(item) + " declares " + std::to_string(count) +
                                                 " descriptors but the container ends after " +
                                                 std::to_string((bytes.size() - offset) / width));
        sets.emplace_back(width, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                                           bytes.begin() + static_cast<std::ptrdiff_t>(offset + payload)));
        offset += payload;
    }
    if (offset != bytes.size()) throw DataError(Kind::Format, "trailing bytes after the last item");
    return sets;
}

std::vector<DescriptorSet> parse_descriptor_hex(const std::string& text)
{
    using Kind = DataError::Kind;
    auto hex_value = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };

    std::vector<DescriptorSet> sets;
    std::size_t width = 0;
    auto lines = split_lines(text);
    while (!lines.empty() && blank(lines.back())) lines.pop_back();
    for (std::size_t row = 0; row < lines.size(); ++row) {
        const auto tokens = split_ws(lines[row]);
        if (tokens.empty()) throw DataError(Kind::Empty, "item " + std::to_string(row) + " has zero descriptors");
        std::vector<std::uint8_t> bytes;
        for (std::size_t col = 0; col < tokens.size(); ++col) {
            const auto tok = tokens[col];
            if (tok.size() % 2 != 0 || tok.empty())
                throw DataError(Kind::Parse, "hex descriptor has an odd number of digits", row, col);
            const std::size_t w = tok.size() / 2;
            if (width == 0) width = w;
            if (w != width)
                throw DataError(Kind::Width, "descriptor width " + std::to_string(w) + " bytes, expected " +
                                                 std::to_string(width), row, col);
            for (std::size_t k = 0; k < tok.size(); k += 2) {
                const int hi = hex_value(tok[k]);
                const int lo = hex_value(tok[k + 1]);
                if (hi < 0 || lo < 0) throw DataError(Kind::Parse, "invalid hex digit", row, col);
                bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
            }
        }
        sets.emplace_back(width, std::move(bytes));
    }
    if (sets.empty()) throw DataError(Kind::Empty, "descriptor file holds no items");
    return sets;
}

std::vector<DescriptorSet> load_descriptor_sets(const std::filesystem::path& path)
{
    const std::string raw = read_file(path);
    if (raw.size() >= 4 && std::memcmp(raw.data(), kMagic, 4) == 0) {
        const auto* data = reinterpret_cast<const std::uint8_t*>(raw.data());
        return parse_descriptor_container({data, raw.size()});
    }
    return parse_descriptor_hex(raw);
}

std::vector<std::uint8_t> encode_descriptor_container(std::span<const DescriptorSet> sets)
{
    const std::size_t width = sets.empty() ? kDefaultDescriptorWidth : sets.front().width_bytes();
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    write_u32_le(out, static_cast<std::uint32_t>(sets.size()));
    write_u32_le(out, static_cast<std::uint32_t>(width));
    for (const auto& s : sets) {
        if (s.width_bytes() != width) throw DataError(DataError::Kind::Width, "mixed descriptor widths");
        write_u32_le(out, static_cast<std::uint32_t>(s.count()));
        out.insert(out.end(), s.bytes().begin(), s.bytes().end());
    }
    return out;
}

std::string encode_descriptor_hex(std::span<const DescriptorSet> sets)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (const auto& s : sets) {
        for (std::size_t k = 0; k < s.count(); ++k) {
            if (k) out += ' ';
            for (auto b : s.descriptor(k)) {
                out += digits[b >> 4];
                out += digits[b & 0xF];
            }
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ScalarColumn> parse_scalar_csv(const std::string& text)
{
    using Kind = DataError::Kind;
    auto lines = split_lines(text);
    std::vector<std::vector<double>> rows;
    std::size_t columns = 0;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        if (blank(lines[r])) continue;
        std::vector<double> values;
        bool numeric = true;
        std::size_t start = 0;
        const auto line = lines[r];
        while (true) {
            auto end = line.find(',', start);
            auto cell = line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
            double v = 0.0;
            if (!parse_double(cell, v) || !std::isfinite(v)) {
                if (rows.empty() && columns == 0) {
                    numeric = false;
                } else {
                    throw DataError(Kind::Parse, "cannot parse '" + std::string(cell) + "'", r, values.size());
                }
            }
            values.push_back(v);
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        if (columns == 0) columns = values.size();
        else if (values.size() != columns)
            throw DataError(Kind::Shape, "row " + std::to_string(r) + " has " + std::to_string(values.size()) +
                                             " columns, expected " + std::to_string(columns));
        if (numeric) rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError(Kind::Empty, "scalar dataset has no rows");

    std::vector<ScalarColumn> out;
    for (std::size_t c = 0; c < columns; ++c) {
        Eigen::VectorXd raw(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) raw[static_cast<Eigen::Index>(r)] = rows[r][c];
        out.push_back(ScalarColumn::from_raw(raw));
    }
    return out;
}

std::vector<ScalarColumn> load_scalar_csv(const std::filesystem::path& path)
{
    return parse_scalar_csv(read_file(path));
}

} // namespace antclust
