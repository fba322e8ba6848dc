#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "antclust/antclust.hpp"

namespace antclust::cli {

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    const std::string t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw UsageError("invalid value '" + text + "' for " + key);
    return value;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Kind::Parse, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Options of one subcommand that may also come from the config file.
class Bindings {
public:
    explicit Bindings(CLI::App* app) : app_(app) {}

    template <typename T>
    CLI::Option* add(const std::string& name, T& target, const std::string& help)
    {
        auto* opt = app_->add_option("--" + name, target, help);
        setters_[name] = [&target, name](const std::string& value) {
            if constexpr (std::is_same_v<T, std::string>)
                target = trim(value);
            else
                target = parse_number<T>(name, value);
        };
        return opt;
    }

    /// Applies config entries to every option not given on the command line.
    void apply_config(const std::filesystem::path& path) const
    {
        std::string text;
        try {
            text = read_text(path);
        } catch (const DataError&) {
            throw UsageError("cannot read config file " + path.string());
        }
        for (const auto& [key, value] : parse_config_text(text)) {
            auto it = setters_.find(key);
            if (it == setters_.end())
                throw UsageError("unknown config key '" + key + "' for command " + app_->get_name());
            if (app_->get_option("--" + key)->count() == 0) it->second(value);
        }
    }

private:
    CLI::App* app_;
    std::map<std::string, std::function<void(const std::string&)>> setters_;
};

struct EngineFlags {
    Parameters params;
    std::string rules = "labroche";

    void bind(Bindings& b)
    {
        b.add("seed", params.seed, "random seed");
        b.add("alpha", params.iter_alpha, "meeting-phase coefficient: round(0.5 * alpha * N) meetings");
        b.add("beta", params.beta, "template-learning coefficient: round(beta * N) meetings per ant");
        b.add("update-alpha", params.update_alpha, "estimator learning rate");
        b.add("shrink-threshold", params.shrink_threshold, "colony fitness cut, relative to the mean");
        b.add("rules", rules, "rule set (built-in: labroche)");
    }

    void check() const
    {
        try {
            params.validate();
            rule_set_by_name(rules);
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
    }
};

FeatureSet load_features(const std::string& csv, const std::string& matrix, const std::string& descriptors)
{
    std::vector<FeatureColumn> columns;
    if (!csv.empty())
        for (auto& c : load_scalar_csv(csv)) columns.emplace_back(std::move(c));
    if (!matrix.empty())
        columns.emplace_back(MatrixColumn(std::make_shared<const SimilarityMatrix>(load_similarity_matrix(matrix))));
    if (!descriptors.empty()) columns.emplace_back(DescriptorColumn(load_descriptor_sets(descriptors)));
    if (columns.empty()) throw UsageError("no feature source: pass --csv, --matrix or --descriptors");
    return FeatureSet(std::move(columns));
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix)
{
    auto stem = p;
    stem.replace_extension();
    return std::filesystem::path(stem.string() + suffix);
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<std::size_t> parse_count_list(const std::string& text)
{
    const std::string t = trim(text);
    auto number = [&](const std::string& s) {
        auto v = parse_number<std::size_t>("count list '" + text + "'", s);
        if (v == 0) throw UsageError("counts must be positive in '" + text + "'");
        return v;
    };
    std::vector<std::size_t> out;
    if (auto dots = t.find(".."); dots != std::string::npos) {
        const auto colon = t.find(':', dots);
        const std::size_t lo = number(t.substr(0, dots));
        const std::size_t hi = number(t.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
        const std::size_t step = colon == std::string::npos ? 1 : number(t.substr(colon + 1));
        if (hi < lo) throw UsageError("empty range '" + text + "'");
        for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
    } else {
        std::stringstream ss(t);
        std::string part;
        while (std::getline(ss, part, ',')) out.push_back(number(part));
    }
    if (out.empty()) throw UsageError("empty count list");
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    for (std::size_t lineno = 1; std::getline(ss, line); ++lineno) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.starts_with("--")) key.erase(0, 2);
        if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second) throw UsageError("config key '" + key + "' given twice");
        entries.emplace_back(key, trim(std::string_view(t).substr(eq + 1)));
    }
    return entries;
}

LabelVector read_label_csv(const std::filesystem::path& path)
{
    using Kind = DataError::Kind;
    std::stringstream ss(read_text(path));
    std::string line;
    if (!std::getline(ss, line) || trim(line) != "item,label")
        throw DataError(Kind::Format, path.string() + ": expected header 'item,label'");
    std::map<std::int64_t, std::int64_t> rows;
    for (std::size_t row = 1; std::getline(ss, line); ++row) {
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        std::int64_t item = 0, label = 0;
        try {
            if (comma == std::string::npos) throw UsageError("");
            item = parse_number<std::int64_t>("item", line.substr(0, comma));
            label = parse_number<std::int64_t>("label", line.substr(comma + 1));
        } catch (const UsageError&) {
            throw DataError(Kind::Parse, path.string() + ": malformed label row '" + line + "'", row, 0);
        }
        if (!rows.emplace(item, label).second)
            throw DataError(Kind::Format, path.string() + ": item " + std::to_string(item) + " listed twice");
    }
    LabelVector labels;
    for (const auto& [item, label] : rows) {
        if (item != static_cast<std::int64_t>(labels.size()))
            throw DataError(Kind::Format, path.string() + ": items must be numbered 0..n-1");
        labels.push_back(label);
    }
    return labels;
}

std::string format_label_csv(const LabelVector& labels)
{
    std::string out = "item,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out += std::to_string(i) + ',' + std::to_string(labels[i]) + '\n';
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError(DataError::Kind::Format, "cannot write " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            f.close();
            std::filesystem::remove(tmp);
            throw DataError(DataError::Kind::Format, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError(DataError::Kind::Format, "cannot move output into " + path.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"AntClust: clustering by simulated ant nestmate recognition"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every command");

    std::string config_path;
    std::vector<std::pair<CLI::App*, std::unique_ptr<Bindings>>> commands;
    auto command = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "flat key = value file; flags take precedence");
        commands.emplace_back(sub, std::make_unique<Bindings>(sub));
        return std::pair<CLI::App*, Bindings&>{sub, *commands.back().second};
    };

    // cluster
    EngineFlags cluster_engine;
    std::string cluster_csv, cluster_matrix, cluster_descriptors, cluster_out;
    {
        auto [sub, b] = command("cluster", "run AntClust and write an item,label CSV");
        b.add("csv", cluster_csv, "scalar features, one row per item");
        b.add("matrix", cluster_matrix, "precomputed similarity matrix");
        b.add("descriptors", cluster_descriptors, "descriptor container (ADSC binary or hex text)");
        b.add("out", cluster_out, "label CSV to write");
        cluster_engine.bind(b);
    }

    // gen-data
    std::uint64_t gen_seed = 0;
    std::string gen_clusters = "2", gen_tuples = "3", gen_out, gen_truth;
    {
        auto [sub, b] = command("gen-data", "generate a synthetic float dataset around pivots 1..n");
        b.add("clusters", gen_clusters, "number of clusters");
        b.add("tuples", gen_tuples, "items per cluster");
        b.add("seed", gen_seed, "random seed");
        b.add("out", gen_out, "dataset CSV to write");
        b.add("truth", gen_truth, "ground-truth label CSV (default: <out>.truth.csv)");
    }

    // ari
    std::string ari_truth, ari_pred;
    {
        auto [sub, b] = command("ari", "adjusted Rand index between two label CSVs");
        b.add("truth", ari_truth, "reference labels");
        b.add("pred", ari_pred, "predicted labels");
    }

    // baseline-dbscan
    double eps = kDbscanDefaultEps;
    std::size_t min_samples = kDbscanDefaultMinSamples;
    std::string db_matrix, db_csv, db_out;
    {
        auto [sub, b] = command("baseline-dbscan", "DBSCAN on distance = 1 - similarity");
        b.add("matrix", db_matrix, "similarity matrix file");
        b.add("csv", db_csv, "scalar features, used instead of a matrix");
        b.add("eps", eps, "neighbourhood radius");
        b.add("min-samples", min_samples, "neighbours (self included) for a core point");
        b.add("out", db_out, "label CSV to write; noise is -1");
    }

    // benchmark
    EngineFlags bench_engine;
    std::string bench_task = "float", bench_clusters = "2..30", bench_tuples = "3..90", bench_out, bench_summary;
    std::size_t bench_reps = 1, bench_jobs = 1;
    {
        auto [sub, b] = command("benchmark", "ARI over a clusters x tuples grid");
        b.add("task", bench_task, "float | descriptor");
        b.add("clusters", bench_clusters, "cluster counts: A..B[:STEP] or A,B,...");
        b.add("tuples", bench_tuples, "tuples per cluster: A..B[:STEP] or A,B,...");
        b.add("reps", bench_reps, "repetitions per cell");
        b.add("jobs", bench_jobs, "worker threads");
        b.add("out", bench_out, "per-run CSV to write");
        b.add("summary", bench_summary, "JSON summary (default: <out>.json)");
        bench_engine.bind(b);
    }

    // pack-descriptors
    std::string pack_in, pack_out;
    {
        auto [sub, b] = command("pack-descriptors", "convert hex-text descriptors into an ADSC container");
        b.add("in", pack_in, "hex text file, one line per item");
        b.add("out", pack_out, "ADSC file to write");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        if (!config_path.empty())
            for (const auto& [app_ptr, bindings] : commands)
                if (app_ptr == sub) bindings->apply_config(config_path);

        auto require = [&](const std::string& value, const std::string& flag) {
            if (value.empty()) throw UsageError(name + ": --" + flag + " is required");
        };

        if (name == "cluster") {
            require(cluster_out, "out");
            cluster_engine.check();
            const FeatureSet features = load_features(cluster_csv, cluster_matrix, cluster_descriptors);
            const auto result = run_antclust(features, cluster_engine.params, rule_set_by_name(cluster_engine.rules));
            write_file_atomic(cluster_out, format_label_csv(result.labels));
            out << "colony_count " << result.colony_count << '\n';
        } else if (name == "gen-data") {
            require(gen_out, "out");
            const auto clusters = parse_count_list(gen_clusters);
            const auto tuples = parse_count_list(gen_tuples);
            if (clusters.size() != 1 || tuples.size() != 1)
                throw UsageError("gen-data takes a single cluster count and tuple count");
            Rng rng(gen_seed);
            const auto data = generate_float_dataset(clusters.front(), tuples.front(), rng);
            std::string csv = "value\n";
            for (Eigen::Index i = 0; i < data.values.size(); ++i) csv += shortest(data.values[i]) + '\n';
            const std::filesystem::path truth_path =
                gen_truth.empty() ? with_suffix(gen_out, ".truth.csv") : std::filesystem::path(gen_truth);
            write_file_atomic(gen_out, csv);
            write_file_atomic(truth_path, format_label_csv(data.truth));
            out << "items " << data.truth.size() << '\n';
        } else if (name == "ari") {
            require(ari_truth, "truth");
            require(ari_pred, "pred");
            const auto truth = read_label_csv(ari_truth);
            const auto pred = read_label_csv(ari_pred);
            if (truth.size() != pred.size())
                throw DataError(DataError::Kind::Shape, "label files differ in length (" +
                                                            std::to_string(truth.size()) + " vs " +
                                                            std::to_string(pred.size()) + ")");
            out << shortest(adjusted_rand_index(truth, pred)) << '\n';
        } else if (name == "baseline-dbscan") {
            require(db_out, "out");
            if (db_matrix.empty() == db_csv.empty()) throw UsageError("baseline-dbscan: pass exactly one of --matrix, --csv");
            Eigen::MatrixXd sim = db_matrix.empty() ? load_features(db_csv, "", "").similarity_matrix()
                                                    : load_similarity_matrix(db_matrix).values();
            const auto labels = dbscan_precomputed(distance_from_similarity(sim), eps, min_samples);
            write_file_atomic(db_out, format_label_csv(labels));
            std::set<std::int64_t> clusters(labels.begin(), labels.end());
            clusters.erase(-1);
            out << "clusters " << clusters.size() << '\n';
        } else if (name == "benchmark") {
            require(bench_out, "out");
            bench_engine.check();
            if (bench_engine.rules != "labroche") throw UsageError("benchmark supports only the labroche rule set");
            BenchmarkConfig config;
            if (bench_task == "float")
                config.task = BenchmarkTask::Float;
            else if (bench_task == "descriptor")
                config.task = BenchmarkTask::Descriptor;
            else
                throw UsageError("unknown task '" + bench_task + "' (float | descriptor)");
            config.cluster_counts = parse_count_list(bench_clusters);
            config.tuple_counts = parse_count_list(bench_tuples);
            if (bench_reps == 0) throw UsageError("--reps must be positive");
            config.repetitions = bench_reps;
            config.jobs = bench_jobs;
            config.params = bench_engine.params;
            const auto grid = benchmark_grid(config);
            const std::filesystem::path summary =
                bench_summary.empty() ? with_suffix(bench_out, ".json") : std::filesystem::path(bench_summary);
            write_file_atomic(bench_out, grid_csv(grid));
            write_file_atomic(summary, grid_summary_json(grid));
            out << "mean_ari " << shortest(grid.scores.mean()) << '\n';
        } else if (name == "pack-descriptors") {
            require(pack_in, "in");
            require(pack_out, "out");
            const auto sets = parse_descriptor_hex(read_text(pack_in));
            const auto bytes = encode_descriptor_container(sets);
            write_file_atomic(pack_out, std::string(bytes.begin(), bytes.end()));
            out << "items " << sets.size() << '\n';
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const Error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

int dispatch(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

} // namespace antclust::cli
