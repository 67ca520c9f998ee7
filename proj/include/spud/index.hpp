#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spud/corpus.hpp"
#include "spud/textprep.hpp"

namespace spud {

using DocOrdinal = std::uint32_t;

struct DocStats {
    std::string doc_id;
    std::uint32_t length_tokens = 0;  // |d|
    std::uint32_t length_types = 0;   // |d⃗|, number of distinct terms

    friend bool operator==(DocStats const&, DocStats const&) = default;
};

struct CollectionStats {
    std::uint64_t n = 0;                   // documents, empty ones included
    std::uint64_t total_tokens = 0;        // |c|
    std::uint64_t vocab_size = 0;          // |v|
    std::uint64_t sum_vector_lengths = 0;  // Σ_j |d⃗_j|, equal to Σ_t df_t
    double avg_length_tokens = 0.0;
    double avg_length_types = 0.0;

    friend bool operator==(CollectionStats const&, CollectionStats const&) = default;
};

struct Posting {
    DocOrdinal doc = 0;
    std::uint32_t tf = 0;  // c(t,d)

    friend bool operator==(Posting const&, Posting const&) = default;
};

struct PostingsList {
    std::string term;
    std::uint64_t df = 0;
    std::uint64_t cf = 0;
    std::vector<Posting> postings;  // ascending doc ordinal

    /// c(t,d) for one document, zero when absent. Binary search.
    [[nodiscard]] std::uint32_t tf(DocOrdinal doc) const;

    friend bool operator==(PostingsList const&, PostingsList const&) = default;
};

/// Immutable inverted index with the collection statistics needed by every
/// ranking function. Safe to share read-only between threads.
class InvertedIndex {
  public:
    /// Takes finished tables and validates every cross-reference and
    /// conservation law. `terms` must be sorted by term. Throws DataError.
    InvertedIndex(TokenPipelineConfig pipeline,
                  std::vector<PostingsList> terms,
                  std::vector<DocStats> docs,
                  CollectionStats stats);

    [[nodiscard]] TokenPipelineConfig const& pipeline() const noexcept { return m_pipeline; }
    [[nodiscard]] std::string const& pipeline_hash() const noexcept { return m_pipeline_hash; }
    [[nodiscard]] CollectionStats const& stats() const noexcept { return m_stats; }

    /// Dictionary in lexicographic (byte) order.
    [[nodiscard]] std::span<PostingsList const> terms() const noexcept { return m_terms; }
    [[nodiscard]] std::span<DocStats const> docs() const noexcept { return m_docs; }
    [[nodiscard]] DocStats const& doc(DocOrdinal ordinal) const { return m_docs.at(ordinal); }
    [[nodiscard]] std::size_t num_docs() const noexcept { return m_docs.size(); }

    /// Exact-match lookup on the post-pipeline term form; nullptr if absent.
    [[nodiscard]] PostingsList const* term_lookup(std::string_view term) const;
    [[nodiscard]] std::optional<DocOrdinal> find_doc(std::string_view doc_id) const;

    /// Empty documents are counted in n but never returned by retrieval.
    [[nodiscard]] bool retrievable(DocOrdinal ordinal) const { return m_docs.at(ordinal).length_tokens > 0; }

    friend bool operator==(InvertedIndex const& a, InvertedIndex const& b) {
        return a.m_pipeline == b.m_pipeline && a.m_stats == b.m_stats && a.m_terms == b.m_terms
            && a.m_docs == b.m_docs;
    }

  private:
    TokenPipelineConfig m_pipeline;
    std::string m_pipeline_hash;
    std::vector<PostingsList> m_terms;
    std::vector<DocStats> m_docs;
    CollectionStats m_stats;
    std::unordered_map<std::string, std::uint32_t> m_term_ids;
    std::unordered_map<std::string, DocOrdinal> m_doc_ids;
};

/// Forward view (document -> terms) reconstructed from the postings, needed
/// to enumerate the terms of the feedback documents.
class ForwardIndex {
  public:
    explicit ForwardIndex(InvertedIndex const& index);

    /// (term id into index.terms(), c(t,d)) pairs sorted by term id.
    [[nodiscard]] std::span<std::pair<std::uint32_t, std::uint32_t> const> terms_of(DocOrdinal doc) const;

  private:
    std::vector<std::size_t> m_offsets;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> m_entries;
};

/// Single-writer accumulator. Documents get ordinals in insertion order.
class IndexBuilder {
  public:
    explicit IndexBuilder(TokenPipelineConfig pipeline);

    /// Runs `text` through the pipeline and adds the result.
    void add_document(std::string const& doc_id, std::string_view text);
    /// Adds an already-tokenized document. Throws DataError on a duplicate id.
    void add_tokens(std::string const& doc_id, std::span<std::string const> tokens);

    [[nodiscard]] std::size_t size() const noexcept { return m_docs.size(); }

    /// Throws DataError if no document was added.
    [[nodiscard]] InvertedIndex finalize() &&;

  private:
    TokenPipelineConfig m_pipeline;
    std::vector<DocStats> m_docs;
    std::unordered_map<std::string, DocOrdinal> m_seen_ids;
    std::unordered_map<std::string, std::vector<Posting>> m_postings;
};

[[nodiscard]] InvertedIndex build_index(std::span<Document const> corpus, TokenPipelineConfig const& cfg);

inline constexpr std::string_view index_magic = "spud-inverted-index";
inline constexpr std::uint32_t index_format_version = 1;

/// Writes manifest.json, dictionary.bin, postings.bin and docs.bin into
/// `dir` (created if needed). Output is byte-deterministic.
void save_index(InvertedIndex const& index, std::filesystem::path const& dir);

/// Throws VersionMismatchError, TruncatedFileError, ChecksumError or
/// DataError depending on what is wrong with the directory.
[[nodiscard]] InvertedIndex load_index(std::filesystem::path const& dir);

}  // namespace spud
