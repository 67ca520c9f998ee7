#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spud/index.hpp"

namespace spud {

/// The six query-likelihood ranking functions.
///
///   mql_jm    multinomial, Jelinek-Mercer smoothing (pi)
///   mql_dir   multinomial, Dirichlet prior smoothing (mu)
///   lm2       Dirichlet smoothing over the document-frequency background (U)
///   lm3       Dirichlet smoothing on distinct-term length, cf background (U)
///   spud_jm   Polya urn document model, linear smoothing, no free parameter
///   spud_dir  Polya urn document model, DCM mixture smoothing (mu')
enum class Model { mql_jm, mql_dir, lm2, lm3, spud_jm, spud_dir };

[[nodiscard]] std::string_view model_name(Model model) noexcept;
/// Accepts the names above plus the aliases lm1 (mql_dir) and lm4 (spud_dir).
[[nodiscard]] std::optional<Model> parse_model(std::string_view name) noexcept;
[[nodiscard]] bool takes_parameter(Model model) noexcept;

/// A ranking function together with exactly the parameter it needs.
class ModelConfig {
  public:
    [[nodiscard]] static ModelConfig mql_jm(double pi);
    [[nodiscard]] static ModelConfig mql_dir(double mu);
    [[nodiscard]] static ModelConfig lm2(double u);
    [[nodiscard]] static ModelConfig lm3(double u);
    [[nodiscard]] static ModelConfig spud_jm();
    [[nodiscard]] static ModelConfig spud_dir(double mu_prime);

    /// Throws UsageError when the parameter is missing, superfluous, or
    /// outside the model's domain (pi in (0,1], every mu-like value > 0).
    [[nodiscard]] static ModelConfig make(Model model, std::optional<double> parameter);

    [[nodiscard]] Model model() const noexcept { return m_model; }
    [[nodiscard]] std::optional<double> parameter() const noexcept { return m_parameter; }
    /// The parameter value; throws UsageError for spud_jm.
    [[nodiscard]] double value() const;

    friend bool operator==(ModelConfig const&, ModelConfig const&) = default;

  private:
    ModelConfig(Model model, std::optional<double> parameter) : m_model(model), m_parameter(parameter) {}

    Model m_model;
    std::optional<double> m_parameter;
};

struct QueryTerm {
    std::string term;
    std::uint32_t count = 0;               // c(t,q)
    PostingsList const* postings = nullptr;  // owned by the index the query was prepared against
};

/// A query reduced to in-vocabulary terms, sorted by term.
struct Query {
    std::vector<QueryTerm> terms;
    std::uint32_t total_len = 0;  // |q| after dropping out-of-vocabulary tokens

    [[nodiscard]] bool empty() const noexcept { return terms.empty(); }
};

/// Throws ConfigError when `cfg` is not the pipeline the index was built with.
[[nodiscard]] Query prepare_query(std::string_view raw, InvertedIndex const& index, TokenPipelineConfig const& cfg);
/// Uses the pipeline stored in the index.
[[nodiscard]] Query prepare_query(std::string_view raw, InvertedIndex const& index);

/// Length features of a (possibly synthetic) document.
struct DocFeatures {
    std::uint64_t length_tokens = 0;  // |d|
    std::uint64_t length_types = 0;   // |d⃗|
};

/// Everything the scoring formulas need about one query term in one document.
struct TermEvidence {
    std::uint64_t query_count = 0;  // c(t,q)
    std::uint64_t tf = 0;           // c(t,d)
    std::uint64_t cf = 0;
    std::uint64_t df = 0;
};

/// Efficient common-terms form: a document-length term times |q| plus a sum
/// over query terms present in the document. Natural log. This is the score
/// used for ranking. Throws DomainError for an empty document.
[[nodiscard]] double score_efficient(ModelConfig const& cfg,
                                     CollectionStats const& stats,
                                     DocFeatures doc,
                                     std::span<TermEvidence const> terms);

/// Smoothed probability p(t|M_d) of one term under the model's document model.
[[nodiscard]] double term_probability(ModelConfig const& cfg,
                                      CollectionStats const& stats,
                                      DocFeatures doc,
                                      std::uint64_t tf,
                                      std::uint64_t cf,
                                      std::uint64_t df);

/// SPUD_dir term probability written with the mixing weight omega and the
/// background concentration m_c instead of their composition mu'.
[[nodiscard]] double spud_dir_term_probability(double omega,
                                               double m_c,
                                               CollectionStats const& stats,
                                               DocFeatures doc,
                                               std::uint64_t tf,
                                               std::uint64_t df);

/// Full probability form: sum over query terms of c(t,q) * log p(t|M_d).
/// Rank-equivalent to score_efficient; differs from it by a per-query constant.
[[nodiscard]] double score_probability(ModelConfig const& cfg,
                                       CollectionStats const& stats,
                                       DocFeatures doc,
                                       std::span<TermEvidence const> terms);

/// LM4 written out term by term; the same function as SPUD_dir with U = mu'.
[[nodiscard]] double score_lm4(double u,
                               CollectionStats const& stats,
                               DocFeatures doc,
                               std::span<TermEvidence const> terms);

/// Gathers the evidence for an indexed document.
[[nodiscard]] std::vector<TermEvidence> gather_evidence(Query const& q, InvertedIndex const& index, DocOrdinal doc);
[[nodiscard]] DocFeatures features_of(DocStats const& doc) noexcept;

// Per-model scorers over an indexed document.
[[nodiscard]] double score_mql_jm(Query const& q, DocOrdinal d, InvertedIndex const& index, double pi);
[[nodiscard]] double score_mql_dir(Query const& q, DocOrdinal d, InvertedIndex const& index, double mu);
[[nodiscard]] double score_lm2(Query const& q, DocOrdinal d, InvertedIndex const& index, double u);
[[nodiscard]] double score_lm3(Query const& q, DocOrdinal d, InvertedIndex const& index, double u);
[[nodiscard]] double score_spud_jm(Query const& q, DocOrdinal d, InvertedIndex const& index);
[[nodiscard]] double score_spud_dir(Query const& q, DocOrdinal d, InvertedIndex const& index, double mu_prime);
[[nodiscard]] double score_lm4(Query const& q, DocOrdinal d, InvertedIndex const& index, double u);

struct ScoredDoc {
    std::string doc_id;
    DocOrdinal ordinal = 0;
    double score = 0.0;
};

/// Score descending, ties by ascending doc_id.
[[nodiscard]] bool ranks_before(ScoredDoc const& a, ScoredDoc const& b) noexcept;

struct Ranking {
    std::vector<ScoredDoc> docs;
    bool empty_query = false;  // warning: nothing to score
};

/// Document-at-a-time evaluation over the query's postings. Candidates are
/// the documents containing at least one query term; returns the top k.
/// Throws UsageError for k == 0.
[[nodiscard]] Ranking retrieve(Query const& q, InvertedIndex const& index, ModelConfig const& cfg, std::size_t k);

}  // namespace spud
