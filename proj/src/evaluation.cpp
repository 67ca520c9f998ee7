#include "spud/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "spud/errors.hpp"
#include "spud/parallel.hpp"

namespace spud {

namespace {

std::string slurp(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        auto start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        if (start < pos) {
            fields.push_back(line.substr(start, pos - start));
        }
    }
    return fields;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<double> parse_double(std::string_view s) {
    // from_chars for double is missing from older libstdc++.
    std::string copy(s);
    char* end = nullptr;
    double v = std::strtod(copy.c_str(), &end);
    if (end != copy.c_str() + copy.size() || copy.empty() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        fn(line_no, text.substr(pos, end - pos));
        pos = end + 1;
    }
}

double mean_of(std::span<TopicMetrics const> rows, Metric m) {
    if (rows.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (auto const& r : rows) {
        sum += r.get(m);
    }
    return sum / static_cast<double>(rows.size());
}

}  // namespace

std::set<std::string> Qrels::relevant(std::string const& topic) const {
    std::set<std::string> out;
    if (auto it = judgments.find(topic); it != judgments.end()) {
        for (auto const& [doc, grade] : it->second) {
            if (grade >= 1) {
                out.insert(doc);
            }
        }
    }
    return out;
}

std::size_t Qrels::relevant_count(std::string const& topic) const { return relevant(topic).size(); }

Qrels parse_qrels(std::string_view text) {
    Qrels qrels;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto f = split_fields(line);
        if (f.empty()) {
            return;
        }
        std::optional<int> grade = f.size() == 4 ? parse_number<int>(f[3]) : std::nullopt;
        if (!grade) {
            throw DataError(fmt::format("qrels line {}: expected 'topic 0 doc grade'", line_no));
        }
        auto& topic = qrels.judgments[std::string(f[0])];
        if (!topic.emplace(std::string(f[2]), *grade).second) {
            throw DataError(fmt::format("qrels line {}: duplicate judgment for topic {} document {}", line_no, f[0], f[2]));
        }
    });
    return qrels;
}

Qrels read_qrels(std::filesystem::path const& path) { return parse_qrels(slurp(path)); }

RunFile parse_run(std::string_view text) {
    RunFile run;
    bool have_tag = false;
    std::map<std::string, std::vector<std::pair<long, RunEntry>>> raw;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto f = split_fields(line);
        if (f.empty()) {
            return;
        }
        if (f.size() != 6) {
            throw DataError(fmt::format("run line {}: expected 6 fields, found {}", line_no, f.size()));
        }
        auto rank = parse_number<long>(f[3]);
        auto score = parse_double(f[4]);
        if (!rank || !score) {
            throw DataError(fmt::format("run line {}: malformed rank or score", line_no));
        }
        if (!have_tag) {
            run.tag = std::string(f[5]);
            have_tag = true;
        } else if (run.tag != f[5]) {
            throw DataError(fmt::format("run line {}: run tag '{}' differs from '{}'", line_no, f[5], run.tag));
        }
        raw[std::string(f[0])].emplace_back(*rank, RunEntry{std::string(f[2]), *score});
    });
    for (auto& [topic, entries] : raw) {
        std::sort(entries.begin(), entries.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
        std::set<std::string_view> seen;
        auto& out = run.topics[topic];
        for (std::size_t i = 0; i < entries.size(); ++i) {
            auto const& [rank, entry] = entries[i];
            if (rank != static_cast<long>(i + 1)) {
                throw DataError(fmt::format("run topic {}: ranks are not 1..{}", topic, entries.size()));
            }
            if (i > 0 && entry.score > entries[i - 1].second.score) {
                throw DataError(fmt::format("run topic {}: score increases at rank {}", topic, rank));
            }
            if (!seen.insert(entry.doc_id).second) {
                throw DataError(fmt::format("run topic {}: document {} appears twice", topic, entry.doc_id));
            }
            out.push_back(entry);
        }
    }
    return run;
}

RunFile read_run(std::filesystem::path const& path) { return parse_run(slurp(path)); }

void write_run(std::ostream& out, RunFile const& run) { out << format_run(run); }

std::string format_run(RunFile const& run) {
    std::string text;
    for (auto const& [topic, entries] : run.topics) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            text += fmt::format("{} Q0 {} {} {:.6f} {}\n", topic, entries[i].doc_id, i + 1, entries[i].score, run.tag);
        }
    }
    return text;
}

RunFile to_run(std::string const& topic, Ranking const& ranking, RunFile run) {
    // Topics without results have no lines in a run file; mirror that here.
    if (ranking.docs.empty()) {
        run.topics.erase(topic);
        return run;
    }
    auto& entries = run.topics[topic];
    entries.clear();
    for (auto const& d : ranking.docs) {
        entries.push_back(RunEntry{d.doc_id, d.score});
    }
    return run;
}

std::optional<double> average_precision(std::span<std::string const> ranking,
                                        std::set<std::string> const& relevant,
                                        std::size_t cutoff) {
    if (relevant.empty()) {
        return std::nullopt;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    auto depth = std::min(cutoff, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.contains(ranking[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

std::optional<double> ndcg_at_k(std::span<std::string const> ranking,
                                std::map<std::string, int> const& grades,
                                std::size_t k) {
    if (k == 0) {
        throw UsageError("ndcg_at_k: k must be at least 1");
    }
    std::vector<int> ideal;
    for (auto const& [doc, g] : grades) {
        if (g > 0) {
            ideal.push_back(g);
        }
    }
    if (ideal.empty()) {
        return std::nullopt;
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    auto discount = [](std::size_t rank) { return std::log2(static_cast<double>(rank) + 1.0); };
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        auto it = grades.find(ranking[i]);
        if (it != grades.end() && it->second > 0) {
            dcg += static_cast<double>(it->second) / discount(i + 1);
        }
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += static_cast<double>(ideal[i]) / discount(i + 1);
    }
    return dcg / idcg;
}

std::optional<double> recall_at_k(std::span<std::string const> ranking,
                                  std::set<std::string> const& relevant,
                                  std::size_t k) {
    if (relevant.empty()) {
        return std::nullopt;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        hits += relevant.contains(ranking[i]) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

std::string_view metric_name(Metric m) noexcept {
    switch (m) {
    case Metric::map: return "map";
    case Metric::ndcg20: return "ndcg20";
    case Metric::recall1000: return "recall1000";
    }
    return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
    for (auto m : {Metric::map, Metric::ndcg20, Metric::recall1000}) {
        if (metric_name(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

double TopicMetrics::get(Metric m) const noexcept {
    switch (m) {
    case Metric::map: return ap;
    case Metric::ndcg20: return ndcg20;
    case Metric::recall1000: return recall1000;
    }
    return 0.0;
}

double MetricsReport::get(Metric m) const noexcept {
    switch (m) {
    case Metric::map: return map;
    case Metric::ndcg20: return ndcg20;
    case Metric::recall1000: return recall1000;
    }
    return 0.0;
}

MetricsReport evaluate(RunFile const& run, Qrels const& qrels) {
    MetricsReport report;
    for (auto const& [topic, judged] : qrels.judgments) {
        if (qrels.relevant_count(topic) == 0) {
            report.skipped_no_relevant.push_back(topic);
        }
    }
    for (auto const& [topic, entries] : run.topics) {
        auto judged = qrels.judgments.find(topic);
        if (judged == qrels.judgments.end()) {
            report.skipped_not_judged.push_back(topic);
            continue;
        }
        auto relevant = qrels.relevant(topic);
        if (relevant.empty()) {
            continue;
        }
        std::vector<std::string> ranking;
        ranking.reserve(entries.size());
        for (auto const& e : entries) {
            ranking.push_back(e.doc_id);
        }
        report.per_topic.push_back(TopicMetrics{
            topic,
            *average_precision(ranking, relevant, 1000),
            *ndcg_at_k(ranking, judged->second, 20),
            *recall_at_k(ranking, relevant, 1000),
        });
    }
    report.map = mean_of(report.per_topic, Metric::map);
    report.ndcg20 = mean_of(report.per_topic, Metric::ndcg20);
    report.recall1000 = mean_of(report.per_topic, Metric::recall1000);
    return report;
}

SigTestResult paired_ttest(std::span<double const> a, std::span<double const> b) {
    if (a.size() != b.size()) {
        throw UsageError(fmt::format("paired_ttest: vectors differ in length ({} vs {})", a.size(), b.size()));
    }
    if (a.size() < 2) {
        throw UsageError("paired_ttest: at least two pairs are required");
    }
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = a[i] - b[i];
    }
    SigTestResult result;
    auto n = static_cast<double>(diff.size());
    result.n_pairs = diff.size();
    result.mean_diff = std::accumulate(diff.begin(), diff.end(), 0.0) / n;

    auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
    if (*lo == *hi) {
        if (*lo == 0.0) {
            result.mean_diff = 0.0;
            result.t_statistic = 0.0;
            result.p_value = 1.0;
        } else {
            result.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), *lo);
            result.p_value = 0.0;
            result.degenerate = true;
        }
        return result;
    }

    double ss = 0.0;
    for (double d : diff) {
        ss += (d - result.mean_diff) * (d - result.mean_diff);
    }
    double sd = std::sqrt(ss / (n - 1.0));
    result.t_statistic = result.mean_diff / (sd / std::sqrt(n));
    boost::math::students_t_distribution<double> dist(n - 1.0);
    result.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t_statistic))));
    return result;
}

SigTestResult compare_reports(MetricsReport const& a, MetricsReport const& b, Metric metric) {
    if (a.per_topic.size() != b.per_topic.size()) {
        throw DataError(fmt::format("runs evaluate different topic sets ({} vs {} topics)", a.per_topic.size(),
                                    b.per_topic.size()));
    }
    std::vector<double> va;
    std::vector<double> vb;
    for (std::size_t i = 0; i < a.per_topic.size(); ++i) {
        if (a.per_topic[i].topic != b.per_topic[i].topic) {
            throw DataError(fmt::format("runs evaluate different topic sets ({} vs {})", a.per_topic[i].topic,
                                        b.per_topic[i].topic));
        }
        va.push_back(a.per_topic[i].get(metric));
        vb.push_back(b.per_topic[i].get(metric));
    }
    return paired_ttest(va, vb);
}

RunFile run_topics(InvertedIndex const& index,
                   ModelConfig const& cfg,
                   std::span<Topic const> topics,
                   std::size_t k,
                   std::string const& tag,
                   std::size_t threads,
                   std::vector<std::string>* empty_topics) {
    std::vector<Ranking> rankings(topics.size());
    parallel_for(topics.size(), threads, [&](std::size_t i) {
        rankings[i] = retrieve(prepare_query(topics[i].text, index), index, cfg, k);
    });
    RunFile run;
    run.tag = tag;
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        if (!seen.insert(topics[i].id).second) {
            throw DataError(fmt::format("duplicate topic id '{}'", topics[i].id));
        }
        if (rankings[i].empty_query && empty_topics != nullptr) {
            empty_topics->push_back(topics[i].id);
        }
        run = to_run(topics[i].id, rankings[i], std::move(run));
    }
    return run;
}

std::vector<double> default_grid(Model model) {
    std::vector<double> grid;
    switch (model) {
    case Model::spud_jm:
        throw UsageError("spud_jm has no parameter to sweep");
    case Model::mql_jm:
        for (int i = 1; i <= 10; ++i) {
            grid.push_back(i / 10.0);
        }
        break;
    default:
        for (int i = 1; i <= 10; ++i) {
            grid.push_back(250.0 * i);
        }
    }
    return grid;
}

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<double> grid;
    auto bad = [&] { return UsageError(fmt::format("malformed grid '{}'", spec)); };
    if (spec.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (true) {
            auto end = spec.find(':', pos);
            auto v = parse_double(spec.substr(pos, end == std::string_view::npos ? end : end - pos));
            if (!v) {
                throw bad();
            }
            parts.push_back(*v);
            if (end == std::string_view::npos) {
                break;
            }
            pos = end + 1;
        }
        if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) {
            throw bad();
        }
        auto steps = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (std::size_t i = 0; i <= steps; ++i) {
            grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
        }
        return grid;
    }
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        auto end = spec.find(',', pos);
        auto v = parse_double(spec.substr(pos, end == std::string_view::npos ? end : end - pos));
        if (!v) {
            throw bad();
        }
        grid.push_back(*v);
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
    return grid;
}

SweepResult sweep(InvertedIndex const& index,
                  Model model,
                  std::span<double const> grid,
                  std::span<Topic const> topics,
                  Qrels const& qrels,
                  std::size_t k,
                  std::size_t threads) {
    if (grid.empty()) {
        throw UsageError("sweep: the grid is empty");
    }
    if (!takes_parameter(model)) {
        throw UsageError(fmt::format("{} has no parameter to sweep", model_name(model)));
    }
    SweepResult result;
    result.model = model;
    for (double param : grid) {
        SweepRow row;
        row.param = param;
        try {
            auto cfg = ModelConfig::make(model, param);
            auto run = run_topics(index, cfg, topics, k, "sweep", threads);
            row.report = evaluate(run, qrels);
        } catch (Error const& e) {
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

}  // namespace spud
