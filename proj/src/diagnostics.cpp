#include "spud/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "spud/errors.hpp"

namespace spud {

Lnc2Report check_lnc2(CollectionStats const& stats, ModelConfig const& cfg, std::span<Lnc2Trial const> trials) {
    Lnc2Report report;
    report.model = cfg.model();
    report.outcomes.reserve(trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i) {
        auto const& trial = trials[i];
        if (trial.copies_added == 0) {
            throw UsageError("check_lnc2: k must be at least 1");
        }
        std::uint64_t copies = std::uint64_t{trial.copies_added} + 1;
        auto concat_terms = trial.terms;
        for (auto& t : concat_terms) {
            t.tf *= copies;
        }
        DocFeatures concat_doc{trial.doc.length_tokens * copies, trial.doc.length_types};

        Lnc2Outcome outcome;
        outcome.score_original = score_efficient(cfg, stats, trial.doc, trial.terms);
        outcome.score_concat = score_efficient(cfg, stats, concat_doc, concat_terms);
        outcome.abs_delta = std::abs(outcome.score_concat - outcome.score_original);
        report.max_abs_delta = std::max(report.max_abs_delta, outcome.abs_delta);
        if (outcome.abs_delta > lnc2_tolerance && !report.witness) {
            report.witness = i;
        }
        report.outcomes.push_back(outcome);
    }
    report.satisfied = !report.witness.has_value();
    return report;
}

Lnc2Trial make_lnc2_trial(Query const& q, InvertedIndex const& index, DocOrdinal doc, std::uint32_t k) {
    auto const& stats = index.doc(doc);
    return Lnc2Trial{gather_evidence(q, index, doc), features_of(stats), k,
                     fmt::format("doc={} k={}", stats.doc_id, k)};
}

std::vector<Lnc2Trial> random_lnc2_trials(InvertedIndex const& index,
                                          ForwardIndex const& forward,
                                          std::size_t count,
                                          std::uint64_t seed) {
    std::vector<DocOrdinal> nonempty;
    for (DocOrdinal d = 0; d < index.num_docs(); ++d) {
        if (index.retrievable(d)) {
            nonempty.push_back(d);
        }
    }
    if (nonempty.empty() || index.terms().empty()) {
        throw DataError("random_lnc2_trials: the index has no non-empty document");
    }
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    auto terms = index.terms();

    std::vector<Lnc2Trial> trials;
    trials.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        DocOrdinal doc = nonempty[uniform(nonempty.size())];
        auto doc_terms = forward.terms_of(doc);
        std::size_t query_len = 1 + uniform(4);
        std::set<std::uint32_t> chosen;
        for (std::size_t j = 0; j < query_len; ++j) {
            if (uniform(4) != 0) {
                chosen.insert(doc_terms[uniform(doc_terms.size())].first);
            } else {
                chosen.insert(static_cast<std::uint32_t>(uniform(terms.size())));
            }
        }
        Query q;
        for (auto id : chosen) {
            auto c = static_cast<std::uint32_t>(1 + uniform(2));
            q.terms.push_back(QueryTerm{terms[id].term, c, &terms[id]});
            q.total_len += c;
        }
        trials.push_back(make_lnc2_trial(q, index, doc, static_cast<std::uint32_t>(1 + uniform(10))));
    }
    return trials;
}

LengthBinCurve length_bin_analysis(RunFile const& run,
                                   Qrels const& qrels,
                                   InvertedIndex const& index,
                                   std::size_t n_bins,
                                   LengthKind kind) {
    if (n_bins < 2) {
        throw UsageError("length_bin_analysis: at least two bins are required");
    }
    if (qrels.judgments.empty()) {
        throw DataError("length_bin_analysis: the qrels are empty");
    }
    auto n = index.num_docs();
    if (n < n_bins) {
        throw UsageError(fmt::format("length_bin_analysis: {} documents cannot fill {} bins", n, n_bins));
    }
    auto length_of = [&](DocOrdinal d) -> std::uint64_t {
        auto const& s = index.doc(d);
        return kind == LengthKind::tokens ? s.length_tokens : s.length_types;
    };
    std::vector<DocOrdinal> order(n);
    for (DocOrdinal d = 0; d < n; ++d) {
        order[d] = d;
    }
    std::stable_sort(order.begin(), order.end(), [&](DocOrdinal a, DocOrdinal b) { return length_of(a) < length_of(b); });
    std::vector<std::size_t> bin_of(n);
    LengthBinCurve curve;
    curve.kind = kind;
    curve.bins.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        auto first = b * n / n_bins;
        auto last = (b + 1) * n / n_bins;
        curve.bins[b].documents = last - first;
        curve.bins[b].min_length = length_of(order[first]);
        curve.bins[b].max_length = length_of(order[last - 1]);
        for (auto i = first; i < last; ++i) {
            bin_of[order[i]] = b;
        }
    }

    std::vector<double> retrieved(n_bins, 0.0);
    std::size_t retrieved_total = 0;
    for (auto const& [topic, entries] : run.topics) {
        for (std::size_t i = 0; i < std::min<std::size_t>(entries.size(), 1000); ++i) {
            auto d = index.find_doc(entries[i].doc_id);
            if (!d) {
                throw DataError(fmt::format("run document '{}' is not in the index", entries[i].doc_id));
            }
            retrieved[bin_of[*d]] += 1.0;
            ++retrieved_total;
        }
    }
    if (retrieved_total < n_bins) {
        throw UsageError(fmt::format("length_bin_analysis: {} retrieved documents cannot fill {} bins",
                                     retrieved_total, n_bins));
    }

    std::vector<double> relevant(n_bins, 0.0);
    std::size_t relevant_total = 0;
    for (auto const& [topic, docs] : qrels.judgments) {
        for (auto const& [doc_id, grade] : docs) {
            if (grade < 1) {
                continue;
            }
            if (auto d = index.find_doc(doc_id)) {
                relevant[bin_of[*d]] += 1.0;
                ++relevant_total;
            }
        }
    }
    if (relevant_total == 0) {
        throw DataError("length_bin_analysis: no relevant document of the qrels is in the index");
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
        curve.bins[b].p_retrieved = retrieved[b] / static_cast<double>(retrieved_total);
        curve.bins[b].p_relevant = relevant[b] / static_cast<double>(relevant_total);
    }
    return curve;
}

void write_length_bins_csv(std::ostream& out, LengthBinCurve const& curve) {
    fmt::print(out, "bin,min_{0},max_{0},documents,p_retrieved,p_relevant\n",
               curve.kind == LengthKind::tokens ? "tokens" : "types");
    for (std::size_t b = 0; b < curve.bins.size(); ++b) {
        auto const& bin = curve.bins[b];
        fmt::print(out, "{},{},{},{},{:.6f},{:.6f}\n", b + 1, bin.min_length, bin.max_length, bin.documents,
                   bin.p_retrieved, bin.p_relevant);
    }
}

BackgroundRatioRow background_ratio(InvertedIndex const& index, PostingsList const& term) {
    auto const& stats = index.stats();
    BackgroundRatioRow row;
    row.term = term.term;
    row.p_multinomial = static_cast<double>(term.cf) / static_cast<double>(stats.total_tokens);
    row.p_dcm = static_cast<double>(term.df) / static_cast<double>(stats.sum_vector_lengths);
    row.ratio = row.p_dcm / row.p_multinomial;
    return row;
}

BackgroundRatioTable background_ratio_table(InvertedIndex const& index,
                                            std::span<std::string const> terms,
                                            std::size_t top_n) {
    std::vector<BackgroundRatioRow> rows;
    if (terms.empty()) {
        for (auto const& list : index.terms()) {
            rows.push_back(background_ratio(index, list));
        }
    } else {
        std::set<std::string> unique(terms.begin(), terms.end());
        for (auto const& t : unique) {
            if (auto const* list = index.term_lookup(t)) {
                rows.push_back(background_ratio(index, *list));
            }
        }
    }
    BackgroundRatioTable table;
    auto descending = [](auto const& a, auto const& b) { return a.ratio != b.ratio ? a.ratio > b.ratio : a.term < b.term; };
    auto ascending = [](auto const& a, auto const& b) { return a.ratio != b.ratio ? a.ratio < b.ratio : a.term < b.term; };
    auto keep = std::min(top_n, rows.size());
    table.top = rows;
    std::partial_sort(table.top.begin(), table.top.begin() + static_cast<std::ptrdiff_t>(keep), table.top.end(), descending);
    table.top.resize(keep);
    table.bottom = std::move(rows);
    std::partial_sort(table.bottom.begin(), table.bottom.begin() + static_cast<std::ptrdiff_t>(keep), table.bottom.end(),
                      ascending);
    table.bottom.resize(keep);
    return table;
}

std::vector<IdfPoint> idf_family_curve(std::uint64_t n, double delta, std::span<std::uint64_t const> dfs) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw UsageError(fmt::format("idf_family_curve: delta must be positive, got {}", delta));
    }
    std::vector<IdfPoint> curve;
    curve.reserve(dfs.size());
    auto dn = static_cast<double>(n);
    for (auto df : dfs) {
        if (df == 0 || df > n) {
            throw UsageError(fmt::format("idf_family_curve: df {} outside [1, {}]", df, n));
        }
        auto ratio = dn / static_cast<double>(df);
        curve.push_back(IdfPoint{df, std::log1p(delta * ratio), std::log(ratio)});
    }
    return curve;
}

std::vector<std::uint64_t> default_df_range(std::uint64_t n) {
    std::vector<std::uint64_t> dfs;
    if (n == 0) {
        return dfs;
    }
    if (n <= 1000) {
        for (std::uint64_t df = 1; df <= n; ++df) {
            dfs.push_back(df);
        }
        return dfs;
    }
    constexpr int points = 200;
    for (int i = 0; i <= points; ++i) {
        auto df = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), i / double(points))));
        df = std::clamp<std::uint64_t>(df, 1, n);
        if (dfs.empty() || dfs.back() != df) {
            dfs.push_back(df);
        }
    }
    return dfs;
}

void write_idf_curve_csv(std::ostream& out, std::vector<IdfPoint> const& curve) {
    fmt::print(out, "df,spud_weight,idf\n");
    for (auto const& p : curve) {
        fmt::print(out, "{},{:.6f},{:.6f}\n", p.df, p.spud_weight, p.classic_idf);
    }
}

}  // namespace spud
