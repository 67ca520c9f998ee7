#include "spud/estimation.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "spud/errors.hpp"

namespace spud {

double digamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(fmt::format("digamma: argument must be positive and finite, got {}", x));
    }
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // log x - 1/(2x) - Σ_k B_2k / (2k x^2k), k = 1..7
    double inv = 1.0 / x;
    double inv2 = inv * inv;
    double series = inv2
        * (1.0 / 12
           - inv2
               * (1.0 / 120
                  - inv2
                      * (1.0 / 252
                         - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
    return shift + std::log(x) - 0.5 * inv - series;
}

namespace {

struct Sums {
    std::vector<std::uint64_t> lengths;
    double total_types = 0.0;
    bool all_unit = true;
};

Sums collect(std::span<DocLengths const> docs) {
    Sums s;
    for (auto const& d : docs) {
        if (d.tokens == 0) {
            continue;
        }
        s.lengths.push_back(d.tokens);
        s.total_types += static_cast<double>(d.types);
        s.all_unit = s.all_unit && d.tokens == 1;
    }
    return s;
}

double psi_gap(std::span<std::uint64_t const> lengths, double m) {
    double sum = 0.0;
    for (auto len : lengths) {
        sum += digamma(static_cast<double>(len) + m);
    }
    return sum - static_cast<double>(lengths.size()) * digamma(m);
}

}  // namespace

double mc_residual(std::span<DocLengths const> docs, double m_c) {
    auto s = collect(docs);
    if (s.lengths.empty()) {
        throw DomainError("estimate_mc: no non-empty documents");
    }
    return 1.0 - m_c * psi_gap(s.lengths, m_c) / s.total_types;
}

McEstimate estimate_mc(std::span<DocLengths const> docs, McOptions const& options) {
    if (!std::isfinite(options.init) || options.init <= 0.0) {
        throw DomainError(fmt::format("estimate_mc: init must be positive, got {}", options.init));
    }
    if (!(options.tol > 0.0)) {
        throw DomainError("estimate_mc: tol must be positive");
    }
    auto s = collect(docs);
    if (s.lengths.empty()) {
        throw DomainError("estimate_mc: no non-empty documents");
    }

    McEstimate est;
    est.m_c = options.init;
    est.uninformative = s.all_unit;
    double m = options.init;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        double gap = psi_gap(s.lengths, m);
        double next = s.total_types / gap;
        if (!std::isfinite(next) || next <= 0.0) {
            throw DivergenceError(
                fmt::format("estimate_mc diverged at iteration {}: m_c = {} -> {}", it, m, next), m, it);
        }
        double change = std::abs(next - m) / m;
        m = next;
        est.iterations = it;
        if (change < options.tol) {
            est.converged = true;
            break;
        }
    }
    est.m_c = m;
    est.residual = 1.0 - m * psi_gap(s.lengths, m) / s.total_types;
    return est;
}

McEstimate estimate_mc(InvertedIndex const& index, McOptions const& options) {
    std::vector<DocLengths> docs;
    docs.reserve(index.num_docs());
    for (auto const& d : index.docs()) {
        docs.push_back(DocLengths{d.length_tokens, d.length_types});
    }
    return estimate_mc(docs, options);
}

namespace {

// omega/(1 - omega) with omega read as the decimal it was written as, so that
// 0.8 gives exactly 4 rather than 4.000000000000001. Falls back to plain
// division when the shortest decimal form needs too many digits.
double odds(double omega) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, omega, std::chars_format::fixed);
    std::string_view text(buf, ec == std::errc{} ? std::size_t(end - buf) : 0);
    auto dot = text.find('.');
    if (text.size() < 2 || text.substr(0, 2) != "0." || dot != 1 || text.size() - 2 > 15) {
        return omega / (1.0 - omega);
    }
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    for (char ch : text.substr(2)) {
        num = num * 10 + std::uint64_t(ch - '0');
        den *= 10;
    }
    return double(num) / double(den - num);
}

}  // namespace

double derive_mu_prime(double omega, double m_c) {
    if (!(omega > 0.0 && omega < 1.0)) {
        throw DomainError(fmt::format("omega must lie strictly between 0 and 1, got {}", omega));
    }
    if (!std::isfinite(m_c) || !(m_c > 0.0)) {
        throw DomainError(fmt::format("m_c must be positive, got {}", m_c));
    }
    return odds(omega) * m_c;
}

SmoothingHyper compose_smoothing(double omega, double m_c) {
    return SmoothingHyper{omega, m_c, derive_mu_prime(omega, m_c)};
}

DocSideEstimates doc_side_estimates(DocStats const& doc) {
    if (doc.length_tokens == 0) {
        throw DomainError(fmt::format("document '{}' is empty", doc.doc_id));
    }
    return DocSideEstimates{static_cast<double>(doc.length_types),
                            static_cast<double>(doc.length_types) / static_cast<double>(doc.length_tokens)};
}

}  // namespace spud
