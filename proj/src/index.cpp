#include "spud/index.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "spud/errors.hpp"

namespace spud {

std::uint32_t PostingsList::tf(DocOrdinal doc) const {
    auto it = std::lower_bound(
        postings.begin(), postings.end(), doc, [](Posting const& p, DocOrdinal d) { return p.doc < d; });
    return (it != postings.end() && it->doc == doc) ? it->tf : 0;
}

namespace {

CollectionStats derive_stats(std::span<DocStats const> docs, std::size_t vocab_size) {
    CollectionStats stats;
    stats.n = docs.size();
    stats.vocab_size = vocab_size;
    for (auto const& d : docs) {
        stats.total_tokens += d.length_tokens;
        stats.sum_vector_lengths += d.length_types;
    }
    if (stats.n > 0) {
        stats.avg_length_tokens = static_cast<double>(stats.total_tokens) / static_cast<double>(stats.n);
        stats.avg_length_types = static_cast<double>(stats.sum_vector_lengths) / static_cast<double>(stats.n);
    }
    return stats;
}

}  // namespace

InvertedIndex::InvertedIndex(TokenPipelineConfig pipeline,
                             std::vector<PostingsList> terms,
                             std::vector<DocStats> docs,
                             CollectionStats stats)
    : m_pipeline(std::move(pipeline)),
      m_pipeline_hash(spud::pipeline_hash(m_pipeline)),
      m_terms(std::move(terms)),
      m_docs(std::move(docs)),
      m_stats(stats) {
    if (m_docs.empty()) {
        throw DataError("index has no documents");
    }
    if (m_docs.size() > std::numeric_limits<DocOrdinal>::max()) {
        throw DataError("too many documents for 32-bit ordinals");
    }
    m_doc_ids.reserve(m_docs.size());
    for (DocOrdinal i = 0; i < m_docs.size(); ++i) {
        if (!m_doc_ids.emplace(m_docs[i].doc_id, i).second) {
            throw DataError(fmt::format("duplicate document id '{}'", m_docs[i].doc_id));
        }
    }

    // Recount document lengths from the postings and check every list.
    std::vector<std::uint64_t> tokens(m_docs.size(), 0);
    std::vector<std::uint64_t> types(m_docs.size(), 0);
    m_term_ids.reserve(m_terms.size());
    for (std::uint32_t id = 0; id < m_terms.size(); ++id) {
        auto const& list = m_terms[id];
        if (list.term.empty()) {
            throw DataError("empty term in dictionary");
        }
        if (id > 0 && !(m_terms[id - 1].term < list.term)) {
            throw DataError(fmt::format("dictionary not strictly sorted at '{}'", list.term));
        }
        if (list.postings.empty() || list.df != list.postings.size()) {
            throw DataError(fmt::format("df of '{}' does not match its postings", list.term));
        }
        std::uint64_t cf = 0;
        for (std::size_t i = 0; i < list.postings.size(); ++i) {
            auto const& p = list.postings[i];
            if (p.doc >= m_docs.size() || p.tf == 0 || (i > 0 && list.postings[i - 1].doc >= p.doc)) {
                throw DataError(fmt::format("malformed postings for '{}'", list.term));
            }
            cf += p.tf;
            tokens[p.doc] += p.tf;
            types[p.doc] += 1;
        }
        if (cf != list.cf) {
            throw DataError(fmt::format("cf of '{}' does not match its postings", list.term));
        }
        m_term_ids.emplace(list.term, id);
    }
    for (std::size_t i = 0; i < m_docs.size(); ++i) {
        if (tokens[i] != m_docs[i].length_tokens || types[i] != m_docs[i].length_types) {
            throw DataError(fmt::format("length statistics of document '{}' are inconsistent", m_docs[i].doc_id));
        }
    }
    if (derive_stats(m_docs, m_terms.size()) != m_stats) {
        throw DataError("collection statistics are inconsistent with the document table");
    }
}

PostingsList const* InvertedIndex::term_lookup(std::string_view term) const {
    auto it = m_term_ids.find(std::string(term));
    return it == m_term_ids.end() ? nullptr : &m_terms[it->second];
}

std::optional<DocOrdinal> InvertedIndex::find_doc(std::string_view doc_id) const {
    auto it = m_doc_ids.find(std::string(doc_id));
    if (it == m_doc_ids.end()) {
        return std::nullopt;
    }
    return it->second;
}

ForwardIndex::ForwardIndex(InvertedIndex const& index) {
    auto n = index.num_docs();
    std::vector<std::size_t> counts(n, 0);
    for (auto const& list : index.terms()) {
        for (auto const& p : list.postings) {
            ++counts[p.doc];
        }
    }
    m_offsets.assign(n + 1, 0);
    for (std::size_t d = 0; d < n; ++d) {
        m_offsets[d + 1] = m_offsets[d] + counts[d];
    }
    m_entries.resize(m_offsets[n]);
    std::vector<std::size_t> fill(m_offsets.begin(), m_offsets.end() - 1);
    auto terms = index.terms();
    for (std::uint32_t id = 0; id < terms.size(); ++id) {
        for (auto const& p : terms[id].postings) {
            m_entries[fill[p.doc]++] = {id, p.tf};
        }
    }
}

std::span<std::pair<std::uint32_t, std::uint32_t> const> ForwardIndex::terms_of(DocOrdinal doc) const {
    return std::span(m_entries).subspan(m_offsets.at(doc), m_offsets.at(doc + 1) - m_offsets.at(doc));
}

IndexBuilder::IndexBuilder(TokenPipelineConfig pipeline) : m_pipeline(std::move(pipeline)) {}

void IndexBuilder::add_document(std::string const& doc_id, std::string_view text) {
    auto tokens = tokenize(text, m_pipeline);
    add_tokens(doc_id, tokens);
}

void IndexBuilder::add_tokens(std::string const& doc_id, std::span<std::string const> tokens) {
    if (m_seen_ids.contains(doc_id)) {
        throw DataError(fmt::format("duplicate document id '{}'", doc_id));
    }
    if (m_docs.size() >= std::numeric_limits<DocOrdinal>::max()) {
        throw DataError("too many documents for 32-bit ordinals");
    }
    auto ordinal = static_cast<DocOrdinal>(m_docs.size());
    m_seen_ids.emplace(doc_id, ordinal);

    std::unordered_map<std::string_view, std::uint32_t> counts;
    for (auto const& token : tokens) {
        ++counts[token];
    }
    for (auto const& [term, tf] : counts) {
        m_postings[std::string(term)].push_back(Posting{ordinal, tf});
    }
    m_docs.push_back(DocStats{doc_id, static_cast<std::uint32_t>(tokens.size()),
                              static_cast<std::uint32_t>(counts.size())});
}

InvertedIndex IndexBuilder::finalize() && {
    if (m_docs.empty()) {
        throw DataError("cannot build an index from an empty corpus");
    }
    std::vector<PostingsList> terms;
    terms.reserve(m_postings.size());
    for (auto& [term, postings] : m_postings) {
        PostingsList list;
        list.term = term;
        list.df = postings.size();
        for (auto const& p : postings) {
            list.cf += p.tf;
        }
        list.postings = std::move(postings);
        terms.push_back(std::move(list));
    }
    std::sort(terms.begin(), terms.end(), [](auto const& a, auto const& b) { return a.term < b.term; });
    auto stats = derive_stats(m_docs, terms.size());
    m_postings.clear();
    m_seen_ids.clear();
    return InvertedIndex(std::move(m_pipeline), std::move(terms), std::move(m_docs), stats);
}

InvertedIndex build_index(std::span<Document const> corpus, TokenPipelineConfig const& cfg) {
    IndexBuilder builder(cfg);
    for (auto const& doc : corpus) {
        builder.add_document(doc.id, doc.text);
    }
    return std::move(builder).finalize();
}

}  // namespace spud
