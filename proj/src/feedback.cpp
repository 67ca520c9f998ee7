#include "spud/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "spud/errors.hpp"

namespace spud {

std::string_view variant_name(FeedbackVariant v) noexcept { return v == FeedbackVariant::rm3 ? "rm3" : "purm"; }

std::optional<FeedbackVariant> parse_variant(std::string_view name) noexcept {
    if (name == "rm3") {
        return FeedbackVariant::rm3;
    }
    if (name == "purm") {
        return FeedbackVariant::purm;
    }
    return std::nullopt;
}

double QueryModel::total() const noexcept {
    double sum = 0.0;
    for (auto const& [term, w] : weights) {
        sum += w;
    }
    return sum;
}

QueryModel query_model_of(Query const& q) {
    QueryModel qm;
    for (auto const& t : q.terms) {
        qm.weights[t.term] = static_cast<double>(t.count) / static_cast<double>(q.total_len);
    }
    return qm;
}

std::vector<double> likelihood_weights(std::span<double const> log_scores) {
    if (log_scores.empty()) {
        return {};
    }
    double max = *std::max_element(log_scores.begin(), log_scores.end());
    std::vector<double> w;
    w.reserve(log_scores.size());
    for (double s : log_scores) {
        w.push_back(std::exp(s - max));
    }
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) {
        x /= sum;
    }
    return w;
}

ExpansionResult expansion_model(Query const& q,
                                InvertedIndex const& index,
                                ForwardIndex const& forward,
                                std::span<ScoredDoc const> initial_run,
                                FeedbackConfig const& cfg) {
    if (initial_run.empty()) {
        throw UsageError("expansion_model: the initial run is empty");
    }
    if (cfg.k_docs == 0 || cfg.n_terms == 0) {
        throw UsageError("expansion_model: k_docs and n_terms must be at least 1");
    }
    if (cfg.expansion_mu < 0.0) {
        throw UsageError("expansion_model: expansion_mu must be non-negative");
    }
    ExpansionResult result;
    auto feedback_docs = initial_run.first(std::min(cfg.k_docs, initial_run.size()));
    result.fewer_docs_than_requested = feedback_docs.size() < cfg.k_docs;

    auto weighting = cfg.variant == FeedbackVariant::purm ? ModelConfig::spud_dir(cfg.weighting_param)
                                                          : ModelConfig::mql_dir(cfg.weighting_param);
    std::vector<double> log_scores;
    for (auto const& d : feedback_docs) {
        auto evidence = gather_evidence(q, index, d.ordinal);
        log_scores.push_back(score_efficient(weighting, index.stats(), features_of(index.doc(d.ordinal)), evidence));
    }
    result.doc_weights = likelihood_weights(log_scores);

    auto terms = index.terms();
    std::map<std::uint32_t, double> expansion;
    if (cfg.expansion_mu == 0.0) {
        for (std::size_t i = 0; i < feedback_docs.size(); ++i) {
            auto ordinal = feedback_docs[i].ordinal;
            double len = static_cast<double>(index.doc(ordinal).length_tokens);
            for (auto [term_id, tf] : forward.terms_of(ordinal)) {
                expansion[term_id] += static_cast<double>(tf) / len * result.doc_weights[i];
            }
        }
    } else {
        auto smoothing = cfg.variant == FeedbackVariant::purm ? ModelConfig::spud_dir(cfg.expansion_mu)
                                                              : ModelConfig::mql_dir(cfg.expansion_mu);
        for (auto const& d : feedback_docs) {
            for (auto [term_id, tf] : forward.terms_of(d.ordinal)) {
                expansion.emplace(term_id, 0.0);
            }
        }
        for (std::size_t i = 0; i < feedback_docs.size(); ++i) {
            auto ordinal = feedback_docs[i].ordinal;
            auto features = features_of(index.doc(ordinal));
            for (auto& [term_id, weight] : expansion) {
                auto const& list = terms[term_id];
                weight += term_probability(smoothing, index.stats(), features, list.tf(ordinal), list.cf, list.df)
                    * result.doc_weights[i];
            }
        }
    }

    std::vector<std::pair<std::uint32_t, double>> ranked(expansion.begin(), expansion.end());
    // Term ids follow lexicographic order, so the id breaks ties.
    std::sort(ranked.begin(), ranked.end(), [](auto const& a, auto const& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    ranked.resize(std::min(ranked.size(), cfg.n_terms));
    double kept = 0.0;
    for (auto const& [id, w] : ranked) {
        kept += w;
    }
    for (auto const& [id, w] : ranked) {
        result.model.weights[terms[id].term] = w / kept;
    }
    return result;
}

QueryModel smooth_query(QueryModel const& original, QueryModel const& expansion, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw UsageError(fmt::format("tau must lie in [0, 1], got {}", tau));
    }
    QueryModel out;
    for (auto const& [term, w] : original.weights) {
        out.weights[term] += tau * w;
    }
    for (auto const& [term, w] : expansion.weights) {
        out.weights[term] += (1.0 - tau) * w;
    }
    std::erase_if(out.weights, [](auto const& kv) { return kv.second <= 0.0; });
    return out;
}

QueryModel smooth_query(Query const& q, QueryModel const& expansion, double tau) {
    return smooth_query(query_model_of(q), expansion, tau);
}

Ranking rerank_with_model(QueryModel const& qm, InvertedIndex const& index, ModelConfig const& cfg, std::size_t k) {
    if (k == 0) {
        throw UsageError("rerank_with_model: k must be at least 1");
    }
    Ranking ranking;
    struct Term {
        double weight;
        PostingsList const* list;
        std::size_t pos = 0;
    };
    std::vector<Term> terms;
    for (auto const& [term, w] : qm.weights) {
        if (w <= 0.0) {
            continue;
        }
        auto const* list = index.term_lookup(term);
        if (list == nullptr) {
            throw UsageError(fmt::format("query model term '{}' is not in the index", term));
        }
        terms.push_back(Term{w, list});
    }
    if (terms.empty()) {
        ranking.empty_query = true;
        return ranking;
    }

    constexpr auto exhausted = std::numeric_limits<DocOrdinal>::max();
    auto current = [](Term const& t) { return t.pos < t.list->postings.size() ? t.list->postings[t.pos].doc : exhausted; };
    std::vector<ScoredDoc> candidates;
    std::vector<std::uint64_t> tfs(terms.size());
    while (true) {
        DocOrdinal doc = exhausted;
        for (auto const& t : terms) {
            doc = std::min(doc, current(t));
        }
        if (doc == exhausted) {
            break;
        }
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (current(terms[i]) == doc) {
                tfs[i] = terms[i].list->postings[terms[i].pos].tf;
                ++terms[i].pos;
            } else {
                tfs[i] = 0;
            }
        }
        auto const& stats = index.doc(doc);
        auto features = features_of(stats);
        double score = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            score += terms[i].weight
                * std::log(term_probability(cfg, index.stats(), features, tfs[i], terms[i].list->cf, terms[i].list->df));
        }
        candidates.push_back(ScoredDoc{stats.doc_id, doc, score});
    }
    auto keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      ranks_before);
    candidates.resize(keep);
    ranking.docs = std::move(candidates);
    return ranking;
}

}  // namespace spud
