#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spud {

/// Settings of the text-to-token pipeline. Documents and queries must go
/// through the same configuration; the index records its hash.
struct TokenPipelineConfig {
    bool lowercase = true;
    std::set<std::string> stopwords;
    bool stem = true;

    /// Lowercasing, bundled English stopword list, Porter stemming.
    [[nodiscard]] static TokenPipelineConfig english();

    friend bool operator==(TokenPipelineConfig const&, TokenPipelineConfig const&) = default;
};

using TokenStream = std::vector<std::string>;

/// Splits on every character that is not an ASCII letter or digit, lowercases,
/// drops stopwords (matched before stemming) and stems the survivors.
[[nodiscard]] TokenStream tokenize(std::string_view text, TokenPipelineConfig const& cfg);

/// Porter (1980) suffix-stripping stemmer. Expects a lowercase alphabetic
/// word; anything else is returned unchanged.
[[nodiscard]] std::string porter_stem(std::string_view word);

/// The stopword list shipped with the library (data/stopwords.txt).
[[nodiscard]] std::set<std::string> const& default_stopwords();

/// Parses a stopword file: one word per line, blank lines and lines starting
/// with '#' ignored, surrounding whitespace trimmed, words lowercased.
[[nodiscard]] std::set<std::string> parse_stopwords(std::string_view contents);
[[nodiscard]] std::set<std::string> load_stopwords(std::filesystem::path const& path);

/// Stable 64-bit FNV-1a digest of the pipeline settings, rendered as 16 hex
/// digits. Identical configurations hash identically across runs and hosts.
[[nodiscard]] std::string pipeline_hash(TokenPipelineConfig const& cfg);

}  // namespace spud
