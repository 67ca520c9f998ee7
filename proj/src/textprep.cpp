#include "spud/textprep.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spud/errors.hpp"

namespace spud {

// Generated from data/stopwords.txt at configure time.
extern std::string_view const bundled_stopwords_text;

namespace {

constexpr bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

constexpr char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

TokenPipelineConfig TokenPipelineConfig::english() {
    return TokenPipelineConfig{.lowercase = true, .stopwords = default_stopwords(), .stem = true};
}

TokenStream tokenize(std::string_view text, TokenPipelineConfig const& cfg) {
    TokenStream tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && !is_ascii_alnum(text[pos])) {
            ++pos;
        }
        std::size_t start = pos;
        while (pos < text.size() && is_ascii_alnum(text[pos])) {
            ++pos;
        }
        if (start == pos) {
            break;
        }
        std::string token(text.substr(start, pos - start));
        if (cfg.lowercase) {
            for (auto& c : token) {
                c = ascii_lower(c);
            }
        }
        if (cfg.stopwords.contains(token)) {
            continue;
        }
        if (cfg.stem) {
            token = porter_stem(token);
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

std::set<std::string> parse_stopwords(std::string_view contents) {
    std::set<std::string> words;
    std::istringstream in{std::string(contents)};
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        std::string word = line.substr(first, last - first + 1);
        for (auto& c : word) {
            c = ascii_lower(c);
        }
        words.insert(std::move(word));
    }
    return words;
}

std::set<std::string> load_stopwords(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open stopword file {}", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_stopwords(buffer.str());
}

std::set<std::string> const& default_stopwords() {
    static std::set<std::string> const words = parse_stopwords(bundled_stopwords_text);
    return words;
}

std::string pipeline_hash(TokenPipelineConfig const& cfg) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto feed = [&hash](std::string_view bytes) {
        for (unsigned char c : bytes) {
            hash ^= c;
            hash *= 0x100000001b3ULL;
        }
    };
    feed(cfg.lowercase ? "lowercase=1;" : "lowercase=0;");
    feed(cfg.stem ? "stem=porter1980;" : "stem=none;");
    feed("stopwords=");
    for (auto const& word : cfg.stopwords) {
        feed(word);
        feed("\n");
    }
    return fmt::format("{:016x}", hash);
}

}  // namespace spud
