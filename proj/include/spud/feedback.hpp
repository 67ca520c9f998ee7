#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spud/index.hpp"
#include "spud/ranking.hpp"

namespace spud {

enum class FeedbackVariant {
    rm3,   // documents weighted by their MQL_dir query likelihood
    purm,  // documents weighted by their SPUD_dir query likelihood
};

[[nodiscard]] std::string_view variant_name(FeedbackVariant v) noexcept;
[[nodiscard]] std::optional<FeedbackVariant> parse_variant(std::string_view name) noexcept;

struct FeedbackConfig {
    std::size_t k_docs = 20;
    std::size_t n_terms = 50;
    double tau = 0.5;
    /// Smoothing of the per-document term distributions during expansion;
    /// 0 gives c(t,d)/|d|.
    double expansion_mu = 0.0;
    FeedbackVariant variant = FeedbackVariant::purm;
    /// mu (RM3) or mu' (PURM) of the scorer that weights the feedback documents.
    double weighting_param = 2000.0;
};

/// Term weights summing to one, keyed by term.
struct QueryModel {
    std::map<std::string, double> weights;

    [[nodiscard]] bool empty() const noexcept { return weights.empty(); }
    [[nodiscard]] double total() const noexcept;
};

/// c(t,q)/|q|.
[[nodiscard]] QueryModel query_model_of(Query const& q);

struct ExpansionResult {
    QueryModel model;
    std::vector<double> doc_weights;  // w(d) for each feedback document, in run order
    bool fewer_docs_than_requested = false;
};

/// Relevance-model expansion over the first k_docs entries of `initial_run`.
/// p(t|q_e) = Σ_d p(t|d)·w(d), with w(d) the document's query likelihood
/// normalised over the feedback set. Keeps the n_terms heaviest terms (ties to
/// the lexicographically smaller term) and renormalises.
/// Throws UsageError if the run is empty.
[[nodiscard]] ExpansionResult expansion_model(Query const& q,
                                              InvertedIndex const& index,
                                              ForwardIndex const& forward,
                                              std::span<ScoredDoc const> initial_run,
                                              FeedbackConfig const& cfg);

/// Normalised weights exp(s_i - max s) / Σ_j exp(s_j - max s).
[[nodiscard]] std::vector<double> likelihood_weights(std::span<double const> log_scores);

/// tau·p(t|q) + (1 - tau)·p(t|q_e). Throws UsageError unless 0 <= tau <= 1.
[[nodiscard]] QueryModel smooth_query(QueryModel const& original, QueryModel const& expansion, double tau);
[[nodiscard]] QueryModel smooth_query(Query const& q, QueryModel const& expansion, double tau);

/// Second pass: score(d) = Σ_t p(t|q') · log p(t|M_d) over terms with positive
/// weight, candidates being the documents that contain at least one of them.
/// Same ordering and tie-break as retrieve().
[[nodiscard]] Ranking rerank_with_model(QueryModel const& qm,
                                        InvertedIndex const& index,
                                        ModelConfig const& cfg,
                                        std::size_t k);

}  // namespace spud
