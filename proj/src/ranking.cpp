#include "spud/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "spud/errors.hpp"

namespace spud {

std::string_view model_name(Model model) noexcept {
    switch (model) {
    case Model::mql_jm: return "mql_jm";
    case Model::mql_dir: return "mql_dir";
    case Model::lm2: return "lm2";
    case Model::lm3: return "lm3";
    case Model::spud_jm: return "spud_jm";
    case Model::spud_dir: return "spud_dir";
    }
    return "unknown";
}

std::optional<Model> parse_model(std::string_view name) noexcept {
    static constexpr std::pair<std::string_view, Model> names[] = {
        {"mql_jm", Model::mql_jm}, {"mql_dir", Model::mql_dir}, {"lm1", Model::mql_dir},
        {"lm2", Model::lm2},       {"lm3", Model::lm3},         {"spud_jm", Model::spud_jm},
        {"spud_dir", Model::spud_dir}, {"lm4", Model::spud_dir},
    };
    for (auto const& [n, m] : names) {
        if (n == name) {
            return m;
        }
    }
    return std::nullopt;
}

bool takes_parameter(Model model) noexcept { return model != Model::spud_jm; }

ModelConfig ModelConfig::mql_jm(double pi) { return make(Model::mql_jm, pi); }
ModelConfig ModelConfig::mql_dir(double mu) { return make(Model::mql_dir, mu); }
ModelConfig ModelConfig::lm2(double u) { return make(Model::lm2, u); }
ModelConfig ModelConfig::lm3(double u) { return make(Model::lm3, u); }
ModelConfig ModelConfig::spud_jm() { return make(Model::spud_jm, std::nullopt); }
ModelConfig ModelConfig::spud_dir(double mu_prime) { return make(Model::spud_dir, mu_prime); }

ModelConfig ModelConfig::make(Model model, std::optional<double> parameter) {
    auto name = model_name(model);
    if (!takes_parameter(model)) {
        if (parameter) {
            throw UsageError(fmt::format("{} has no tunable parameter", name));
        }
        return ModelConfig(model, std::nullopt);
    }
    if (!parameter) {
        throw UsageError(fmt::format("{} requires a parameter", name));
    }
    double v = *parameter;
    if (!std::isfinite(v)) {
        throw UsageError(fmt::format("{}: parameter must be finite", name));
    }
    if (model == Model::mql_jm) {
        if (!(v > 0.0 && v <= 1.0)) {
            throw UsageError(fmt::format("mql_jm: pi must lie in (0, 1], got {}", v));
        }
    } else if (!(v > 0.0)) {
        throw UsageError(fmt::format("{}: parameter must be positive, got {}", name, v));
    }
    return ModelConfig(model, v);
}

double ModelConfig::value() const {
    if (!m_parameter) {
        throw UsageError(fmt::format("{} has no tunable parameter", model_name(m_model)));
    }
    return *m_parameter;
}

namespace {

double as_double(std::uint64_t v) { return static_cast<double>(v); }

// Within-document rate scaled by the distinct-term count, |d⃗|·c(t,d)/|d|.
// One rounding of an exact rational, so it is unchanged when c(t,d) and |d|
// are scaled by the same integer.
double scaled_rate(DocFeatures doc, std::uint64_t tf) {
    return as_double(doc.length_types * tf) / as_double(doc.length_tokens);
}

void require_nonempty(DocFeatures doc) {
    if (doc.length_tokens == 0 || doc.length_types == 0) {
        throw DomainError("cannot score an empty document");
    }
}

std::uint64_t query_length(std::span<TermEvidence const> terms) {
    std::uint64_t len = 0;
    for (auto const& t : terms) {
        len += t.query_count;
    }
    return len;
}

}  // namespace

double score_efficient(ModelConfig const& cfg,
                       CollectionStats const& stats,
                       DocFeatures doc,
                       std::span<TermEvidence const> terms) {
    require_nonempty(doc);
    double qlen = as_double(query_length(terms));
    double const tokens = as_double(stats.total_tokens);
    double const vectors = as_double(stats.sum_vector_lengths);

    switch (cfg.model()) {
    case Model::mql_jm: {
        double pi = cfg.value();
        double score = 0.0;
        for (auto const& t : terms) {
            double p = (1.0 - pi) * as_double(t.tf) / as_double(doc.length_tokens) + pi * as_double(t.cf) / tokens;
            score += as_double(t.query_count) * std::log(p);
        }
        return score;
    }
    case Model::mql_dir: {
        double mu = cfg.value();
        double score = qlen * std::log(mu / (mu + as_double(doc.length_tokens)));
        for (auto const& t : terms) {
            if (t.tf > 0) {
                score += as_double(t.query_count) * std::log1p(tokens * as_double(t.tf) / (mu * as_double(t.cf)));
            }
        }
        return score;
    }
    case Model::lm2: {
        double u = cfg.value();
        double score = qlen * std::log(u / (u + as_double(doc.length_tokens)));
        for (auto const& t : terms) {
            if (t.tf > 0) {
                score += as_double(t.query_count) * std::log1p(vectors * as_double(t.tf) / (u * as_double(t.df)));
            }
        }
        return score;
    }
    case Model::lm3: {
        double u = cfg.value();
        double score = qlen * std::log(u / (u + as_double(doc.length_types)));
        for (auto const& t : terms) {
            if (t.tf > 0) {
                score += as_double(t.query_count)
                    * std::log1p(tokens * scaled_rate(doc, t.tf) / (u * as_double(t.cf)));
            }
        }
        return score;
    }
    case Model::spud_jm: {
        // lambda = |d⃗|/|d| is the estimated chance of drawing an unseen term.
        double lambda = as_double(doc.length_types) / as_double(doc.length_tokens);
        double score = qlen * std::log(lambda);
        for (auto const& t : terms) {
            if (t.tf > 0) {
                // (1 - lambda)·c(t,d)/|d⃗| as a single rounding.
                double reinforcement = as_double((doc.length_tokens - doc.length_types) * t.tf)
                    / as_double(doc.length_tokens * doc.length_types);
                score += as_double(t.query_count) * std::log1p(reinforcement * vectors / as_double(t.df));
            }
        }
        return score;
    }
    case Model::spud_dir: {
        double mu = cfg.value();
        double score = qlen * std::log(mu / (mu + as_double(doc.length_types)));
        for (auto const& t : terms) {
            if (t.tf > 0) {
                score += as_double(t.query_count)
                    * std::log1p(vectors * scaled_rate(doc, t.tf) / (mu * as_double(t.df)));
            }
        }
        return score;
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double term_probability(ModelConfig const& cfg,
                        CollectionStats const& stats,
                        DocFeatures doc,
                        std::uint64_t tf,
                        std::uint64_t cf,
                        std::uint64_t df) {
    require_nonempty(doc);
    double const tokens = as_double(stats.total_tokens);
    double const vectors = as_double(stats.sum_vector_lengths);
    double const mle = as_double(tf) / as_double(doc.length_tokens);
    switch (cfg.model()) {
    case Model::mql_jm: {
        double pi = cfg.value();
        return (1.0 - pi) * mle + pi * as_double(cf) / tokens;
    }
    case Model::mql_dir: {
        double mu = cfg.value();
        return (as_double(tf) + mu * as_double(cf) / tokens) / (as_double(doc.length_tokens) + mu);
    }
    case Model::lm2: {
        double u = cfg.value();
        return (as_double(tf) + u * as_double(df) / vectors) / (as_double(doc.length_tokens) + u);
    }
    case Model::lm3: {
        double u = cfg.value();
        return (scaled_rate(doc, tf) + u * as_double(cf) / tokens) / (as_double(doc.length_types) + u);
    }
    case Model::spud_jm: {
        double lambda = as_double(doc.length_types) / as_double(doc.length_tokens);
        return (1.0 - lambda) * mle + lambda * as_double(df) / vectors;
    }
    case Model::spud_dir: {
        double mu = cfg.value();
        return (scaled_rate(doc, tf) + mu * as_double(df) / vectors) / (as_double(doc.length_types) + mu);
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double spud_dir_term_probability(double omega,
                                 double m_c,
                                 CollectionStats const& stats,
                                 DocFeatures doc,
                                 std::uint64_t tf,
                                 std::uint64_t df) {
    require_nonempty(doc);
    if (!(omega > 0.0 && omega < 1.0) || !(m_c > 0.0)) {
        throw DomainError("spud_dir: omega must lie in (0,1) and m_c must be positive");
    }
    // Document DCM has mass m_d = |d⃗| spread by c(t,d)/|d|; the background
    // DCM has mass m_c spread by df_t / Σ|d⃗_j|.
    double doc_mass = (1.0 - omega) * as_double(doc.length_types);
    double background_mass = omega * m_c;
    double numerator = doc_mass * (as_double(tf) / as_double(doc.length_tokens))
        + background_mass * (as_double(df) / as_double(stats.sum_vector_lengths));
    return numerator / (doc_mass + background_mass);
}

double score_probability(ModelConfig const& cfg,
                         CollectionStats const& stats,
                         DocFeatures doc,
                         std::span<TermEvidence const> terms) {
    double score = 0.0;
    for (auto const& t : terms) {
        score += as_double(t.query_count) * std::log(term_probability(cfg, stats, doc, t.tf, t.cf, t.df));
    }
    return score;
}

double score_lm4(double u, CollectionStats const& stats, DocFeatures doc, std::span<TermEvidence const> terms) {
    require_nonempty(doc);
    if (!(u > 0.0)) {
        throw UsageError("lm4: U must be positive");
    }
    double const sum_vectors = as_double(stats.sum_vector_lengths);
    double const vec_len = as_double(doc.length_types);
    double score = as_double(query_length(terms)) * std::log(u / (u + vec_len));
    for (auto const& t : terms) {
        if (t.tf == 0) {
            continue;
        }
        double tf_over_len = as_double(t.tf * doc.length_types) / as_double(doc.length_tokens);
        score += as_double(t.query_count) * std::log1p(sum_vectors * tf_over_len / (u * as_double(t.df)));
    }
    return score;
}

Query prepare_query(std::string_view raw, InvertedIndex const& index, TokenPipelineConfig const& cfg) {
    if (pipeline_hash(cfg) != index.pipeline_hash()) {
        throw ConfigError(fmt::format("query pipeline {} does not match the index pipeline {}", pipeline_hash(cfg),
                                      index.pipeline_hash()));
    }
    std::map<std::string, std::uint32_t> counts;
    for (auto& token : tokenize(raw, cfg)) {
        if (index.term_lookup(token) != nullptr) {
            ++counts[std::move(token)];
        }
    }
    Query q;
    for (auto& [term, count] : counts) {
        auto const* postings = index.term_lookup(term);
        q.total_len += count;
        q.terms.push_back(QueryTerm{term, count, postings});
    }
    return q;
}

Query prepare_query(std::string_view raw, InvertedIndex const& index) {
    return prepare_query(raw, index, index.pipeline());
}

DocFeatures features_of(DocStats const& doc) noexcept { return DocFeatures{doc.length_tokens, doc.length_types}; }

std::vector<TermEvidence> gather_evidence(Query const& q, InvertedIndex const& index, DocOrdinal doc) {
    std::vector<TermEvidence> evidence;
    evidence.reserve(q.terms.size());
    for (auto const& t : q.terms) {
        auto const* postings = t.postings != nullptr ? t.postings : index.term_lookup(t.term);
        if (postings == nullptr) {
            throw UsageError(fmt::format("query term '{}' is not in the index", t.term));
        }
        evidence.push_back(TermEvidence{t.count, postings->tf(doc), postings->cf, postings->df});
    }
    return evidence;
}

namespace {

double score_indexed(ModelConfig const& cfg, Query const& q, DocOrdinal d, InvertedIndex const& index) {
    auto evidence = gather_evidence(q, index, d);
    return score_efficient(cfg, index.stats(), features_of(index.doc(d)), evidence);
}

}  // namespace

double score_mql_jm(Query const& q, DocOrdinal d, InvertedIndex const& index, double pi) {
    return score_indexed(ModelConfig::mql_jm(pi), q, d, index);
}
double score_mql_dir(Query const& q, DocOrdinal d, InvertedIndex const& index, double mu) {
    return score_indexed(ModelConfig::mql_dir(mu), q, d, index);
}
double score_lm2(Query const& q, DocOrdinal d, InvertedIndex const& index, double u) {
    return score_indexed(ModelConfig::lm2(u), q, d, index);
}
double score_lm3(Query const& q, DocOrdinal d, InvertedIndex const& index, double u) {
    return score_indexed(ModelConfig::lm3(u), q, d, index);
}
double score_spud_jm(Query const& q, DocOrdinal d, InvertedIndex const& index) {
    return score_indexed(ModelConfig::spud_jm(), q, d, index);
}
double score_spud_dir(Query const& q, DocOrdinal d, InvertedIndex const& index, double mu_prime) {
    return score_indexed(ModelConfig::spud_dir(mu_prime), q, d, index);
}
double score_lm4(Query const& q, DocOrdinal d, InvertedIndex const& index, double u) {
    auto evidence = gather_evidence(q, index, d);
    return score_lm4(u, index.stats(), features_of(index.doc(d)), evidence);
}

bool ranks_before(ScoredDoc const& a, ScoredDoc const& b) noexcept {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.doc_id < b.doc_id;
}

Ranking retrieve(Query const& q, InvertedIndex const& index, ModelConfig const& cfg, std::size_t k) {
    if (k == 0) {
        throw UsageError("retrieve: k must be at least 1");
    }
    Ranking ranking;
    if (q.empty()) {
        ranking.empty_query = true;
        return ranking;
    }

    struct Cursor {
        std::span<Posting const> postings;
        std::size_t pos = 0;
    };
    std::vector<Cursor> cursors;
    std::vector<TermEvidence> evidence;
    for (auto const& t : q.terms) {
        auto const* postings = t.postings != nullptr ? t.postings : index.term_lookup(t.term);
        if (postings == nullptr) {
            throw UsageError(fmt::format("query term '{}' is not in the index", t.term));
        }
        cursors.push_back(Cursor{postings->postings});
        evidence.push_back(TermEvidence{t.count, 0, postings->cf, postings->df});
    }

    constexpr auto exhausted = std::numeric_limits<DocOrdinal>::max();
    auto current = [](Cursor const& c) { return c.pos < c.postings.size() ? c.postings[c.pos].doc : exhausted; };

    std::vector<ScoredDoc> candidates;
    while (true) {
        DocOrdinal doc = exhausted;
        for (auto const& c : cursors) {
            doc = std::min(doc, current(c));
        }
        if (doc == exhausted) {
            break;
        }
        for (std::size_t i = 0; i < cursors.size(); ++i) {
            auto& c = cursors[i];
            if (current(c) == doc) {
                evidence[i].tf = c.postings[c.pos].tf;
                ++c.pos;
            } else {
                evidence[i].tf = 0;
            }
        }
        auto const& stats = index.doc(doc);
        candidates.push_back(ScoredDoc{stats.doc_id, doc, score_efficient(cfg, index.stats(), features_of(stats), evidence)});
    }

    auto keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      ranks_before);
    candidates.resize(keep);
    ranking.docs = std::move(candidates);
    return ranking;
}

}  // namespace spud
