#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spud/corpus.hpp"
#include "spud/index.hpp"
#include "spud/ranking.hpp"

namespace spud {

/// TREC relevance judgments: topic -> doc -> grade. Grades >= 1 are relevant.
struct Qrels {
    std::map<std::string, std::map<std::string, int>> judgments;

    [[nodiscard]] std::set<std::string> relevant(std::string const& topic) const;
    [[nodiscard]] std::size_t relevant_count(std::string const& topic) const;
};

/// Lines `topic_id 0 doc_id grade`. Throws DataError on malformed lines or a
/// repeated (topic, doc) pair.
[[nodiscard]] Qrels parse_qrels(std::string_view text);
[[nodiscard]] Qrels read_qrels(std::filesystem::path const& path);

struct RunEntry {
    std::string doc_id;
    double score = 0.0;
};

/// Ranked results per topic, in rank order.
struct RunFile {
    std::string tag;
    std::map<std::string, std::vector<RunEntry>> topics;
};

/// Lines `topic_id Q0 doc_id rank score tag`. Checks that each topic's ranks
/// are 1..m, scores never increase with rank, and no document repeats.
[[nodiscard]] RunFile parse_run(std::string_view text);
[[nodiscard]] RunFile read_run(std::filesystem::path const& path);

/// Interchange format with six-decimal scores; topics in key order.
void write_run(std::ostream& out, RunFile const& run);
[[nodiscard]] std::string format_run(RunFile const& run);

[[nodiscard]] RunFile to_run(std::string const& topic, Ranking const& ranking, RunFile run = {});

/// AP over ranks <= cutoff, normalised by all relevant documents of the
/// topic. nullopt when the topic has no relevant document.
[[nodiscard]] std::optional<double> average_precision(std::span<std::string const> ranking,
                                                      std::set<std::string> const& relevant,
                                                      std::size_t cutoff = 1000);

/// DCG with raw grade gains and log2(rank + 1) discounts over the top k,
/// divided by the DCG of the judged grades sorted descending. Unjudged and
/// non-positive grades count as zero. nullopt when nothing is relevant.
[[nodiscard]] std::optional<double> ndcg_at_k(std::span<std::string const> ranking,
                                              std::map<std::string, int> const& grades,
                                              std::size_t k = 20);

[[nodiscard]] std::optional<double> recall_at_k(std::span<std::string const> ranking,
                                                std::set<std::string> const& relevant,
                                                std::size_t k = 1000);

enum class Metric { map, ndcg20, recall1000 };

[[nodiscard]] std::string_view metric_name(Metric m) noexcept;
[[nodiscard]] std::optional<Metric> parse_metric(std::string_view name) noexcept;

struct TopicMetrics {
    std::string topic;
    double ap = 0.0;
    double ndcg20 = 0.0;
    double recall1000 = 0.0;

    [[nodiscard]] double get(Metric m) const noexcept;
};

struct MetricsReport {
    std::vector<TopicMetrics> per_topic;  // evaluated topics, sorted by id
    double map = 0.0;
    double ndcg20 = 0.0;
    double recall1000 = 0.0;
    std::vector<std::string> skipped_no_relevant;  // in qrels without relevant docs
    std::vector<std::string> skipped_not_judged;   // in the run but absent from qrels

    [[nodiscard]] std::size_t topic_count() const noexcept { return per_topic.size(); }
    [[nodiscard]] double get(Metric m) const noexcept;
};

/// Scores every run topic present in the qrels with at least one relevant
/// document. Ranks drive everything; scores are ignored.
[[nodiscard]] MetricsReport evaluate(RunFile const& run, Qrels const& qrels);

struct SigTestResult {
    double t_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_pairs = 0;
    double mean_diff = 0.0;
    /// Differences are constant and non-zero: t is infinite, p reported as 0.
    bool degenerate = false;
};

/// Two-sided paired Student t-test on a - b. Throws UsageError unless both
/// vectors have the same length >= 2.
[[nodiscard]] SigTestResult paired_ttest(std::span<double const> a, std::span<double const> b);

/// Pairs the per-topic values of two reports. Throws DataError unless both
/// evaluated the same topics.
[[nodiscard]] SigTestResult compare_reports(MetricsReport const& a, MetricsReport const& b, Metric metric);

/// Retrieves the top k for every topic. Topics whose text has no indexed term
/// get an empty ranking and are listed in `empty_topics` when given.
[[nodiscard]] RunFile run_topics(InvertedIndex const& index,
                                 ModelConfig const& cfg,
                                 std::span<Topic const> topics,
                                 std::size_t k,
                                 std::string const& tag,
                                 std::size_t threads = 1,
                                 std::vector<std::string>* empty_topics = nullptr);

struct SweepRow {
    double param = 0.0;
    std::optional<MetricsReport> report;  // per-topic values retained
    std::string error;                    // set when this point failed
};

struct SweepResult {
    Model model = Model::mql_dir;
    std::vector<SweepRow> rows;  // grid order
};

/// Grid for tuning: U/mu in {250, 500, ..., 2500}; pi in {0.1, ..., 1.0}.
/// Throws UsageError for spud_jm.
[[nodiscard]] std::vector<double> default_grid(Model model);
/// "start:stop:step" (inclusive) or a comma-separated list.
[[nodiscard]] std::vector<double> parse_grid(std::string_view spec);

/// One batch run plus evaluation per grid point. A failing point records its
/// error and the sweep carries on.
[[nodiscard]] SweepResult sweep(InvertedIndex const& index,
                                Model model,
                                std::span<double const> grid,
                                std::span<Topic const> topics,
                                Qrels const& qrels,
                                std::size_t k = 1000,
                                std::size_t threads = 1);

}  // namespace spud
