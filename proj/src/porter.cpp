#include "spud/textprep.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace spud {

namespace {

// Suffix rewriting over a working buffer. `m_end` marks the current end of
// the word; suffix tests and measure computations only look at [0, m_end).
class PorterStemmer {
  public:
    explicit PorterStemmer(std::string_view word) : m_word(word), m_end(word.size()) {}

    std::string run() && {
        if (m_end <= 2) {
            return m_word;
        }
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        m_word.resize(m_end);
        return std::move(m_word);
    }

  private:
    std::string m_word;
    std::size_t m_end;

    [[nodiscard]] bool is_consonant(std::size_t i) const {
        switch (m_word[i]) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u':
            return false;
        case 'y':
            return i == 0 || !is_consonant(i - 1);
        default:
            return true;
        }
    }

    // Number of VC sequences in [0, len): the m of [C](VC){m}[V].
    [[nodiscard]] std::size_t measure(std::size_t len) const {
        std::size_t i = 0;
        while (i < len && is_consonant(i)) {
            ++i;
        }
        std::size_t m = 0;
        while (i < len) {
            while (i < len && !is_consonant(i)) {
                ++i;
            }
            if (i >= len) {
                break;
            }
            while (i < len && is_consonant(i)) {
                ++i;
            }
            ++m;
        }
        return m;
    }

    [[nodiscard]] bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i) {
            if (!is_consonant(i)) {
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] bool ends_double_consonant(std::size_t len) const {
        return len >= 2 && m_word[len - 1] == m_word[len - 2] && is_consonant(len - 1);
    }

    // *o: stem ends consonant-vowel-consonant, last consonant not w, x or y.
    [[nodiscard]] bool ends_cvc(std::size_t len) const {
        if (len < 3 || !is_consonant(len - 1) || is_consonant(len - 2) || !is_consonant(len - 3)) {
            return false;
        }
        char c = m_word[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    [[nodiscard]] bool ends_with(std::string_view suffix) const {
        return suffix.size() <= m_end
            && std::string_view(m_word).substr(m_end - suffix.size(), suffix.size()) == suffix;
    }

    void replace_suffix(std::size_t suffix_len, std::string_view with) {
        m_word.replace(m_end - suffix_len, m_word.size() - (m_end - suffix_len), with);
        m_end = m_end - suffix_len + with.size();
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    // Applies the rule whose suffix is the longest match, provided the
    // remaining stem has measure > min_measure. Only one rule is considered.
    template <std::size_t N>
    void apply_longest(std::array<Rule, N> const& rules, std::size_t min_measure) {
        Rule const* best = nullptr;
        for (auto const& rule : rules) {
            if (ends_with(rule.suffix) && (best == nullptr || rule.suffix.size() > best->suffix.size())) {
                best = &rule;
            }
        }
        if (best != nullptr && measure(m_end - best->suffix.size()) > min_measure) {
            replace_suffix(best->suffix.size(), best->replacement);
        }
    }

    void step1a() {
        if (ends_with("sses")) {
            replace_suffix(4, "ss");
        } else if (ends_with("ies")) {
            replace_suffix(3, "i");
        } else if (ends_with("ss")) {
            // unchanged
        } else if (ends_with("s")) {
            replace_suffix(1, "");
        }
    }

    void step1b() {
        if (ends_with("eed")) {
            if (measure(m_end - 3) > 0) {
                replace_suffix(3, "ee");
            }
            return;
        }
        std::size_t cut = 0;
        if (ends_with("ed") && has_vowel(m_end - 2)) {
            cut = 2;
        } else if (ends_with("ing") && has_vowel(m_end - 3)) {
            cut = 3;
        }
        if (cut == 0) {
            return;
        }
        replace_suffix(cut, "");
        if (ends_with("at")) {
            replace_suffix(2, "ate");
        } else if (ends_with("bl")) {
            replace_suffix(2, "ble");
        } else if (ends_with("iz")) {
            replace_suffix(2, "ize");
        } else if (ends_double_consonant(m_end)) {
            char c = m_word[m_end - 1];
            if (c != 'l' && c != 's' && c != 'z') {
                replace_suffix(1, "");
            }
        } else if (measure(m_end) == 1 && ends_cvc(m_end)) {
            replace_suffix(0, "e");
        }
    }

    void step1c() {
        if (ends_with("y") && has_vowel(m_end - 1)) {
            m_word[m_end - 1] = 'i';
        }
    }

    void step2() {
        static constexpr std::array<Rule, 20> rules{{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        }};
        apply_longest(rules, 0);
    }

    void step3() {
        static constexpr std::array<Rule, 7> rules{{
            {"icate", "ic"},
            {"ative", ""},
            {"alize", "al"},
            {"iciti", "ic"},
            {"ical", "ic"},
            {"ful", ""},
            {"ness", ""},
        }};
        apply_longest(rules, 0);
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes{
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        std::string_view best;
        for (auto suffix : suffixes) {
            if (ends_with(suffix) && suffix.size() > best.size()) {
                best = suffix;
            }
        }
        if (best.empty()) {
            return;
        }
        std::size_t stem_len = m_end - best.size();
        if (measure(stem_len) <= 1) {
            return;
        }
        if (best == "ion" && (stem_len == 0 || (m_word[stem_len - 1] != 's' && m_word[stem_len - 1] != 't'))) {
            return;
        }
        replace_suffix(best.size(), "");
    }

    void step5a() {
        if (!ends_with("e")) {
            return;
        }
        std::size_t m = measure(m_end - 1);
        if (m > 1 || (m == 1 && !ends_cvc(m_end - 1))) {
            replace_suffix(1, "");
        }
    }

    void step5b() {
        if (m_word[m_end - 1] == 'l' && ends_double_consonant(m_end) && measure(m_end) > 1) {
            replace_suffix(1, "");
        }
    }
};

}  // namespace

std::string porter_stem(std::string_view word) {
    bool lower_alpha = std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (!lower_alpha) {
        return std::string(word);
    }
    return PorterStemmer(word).run();
}

}  // namespace spud
