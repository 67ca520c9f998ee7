#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spud/evaluation.hpp"
#include "spud/index.hpp"
#include "spud/ranking.hpp"

namespace spud {

/// One self-concatenation check: d' holds `copies_added + 1` copies of d, so
/// c(t,d') = (k+1)·c(t,d), |d'| = (k+1)·|d| and |d⃗'| = |d⃗|. Collection
/// statistics are left as they are.
struct Lnc2Trial {
    std::vector<TermEvidence> terms;
    DocFeatures doc;
    std::uint32_t copies_added = 1;  // k >= 1
    std::string label;
};

struct Lnc2Outcome {
    double score_original = 0.0;
    double score_concat = 0.0;
    double abs_delta = 0.0;
};

struct Lnc2Report {
    Model model = Model::spud_dir;
    std::vector<Lnc2Outcome> outcomes;  // one per trial
    double max_abs_delta = 0.0;
    bool satisfied = true;            // max |Δ| <= lnc2_tolerance
    std::optional<std::size_t> witness;  // first violating trial
};

inline constexpr double lnc2_tolerance = 1e-12;

/// Throws UsageError if a trial has k == 0.
[[nodiscard]] Lnc2Report check_lnc2(CollectionStats const& stats,
                                    ModelConfig const& cfg,
                                    std::span<Lnc2Trial const> trials);

[[nodiscard]] Lnc2Trial make_lnc2_trial(Query const& q, InvertedIndex const& index, DocOrdinal doc, std::uint32_t k);

/// Random trials over the index: a random non-empty document, one to four
/// query terms mostly drawn from that document, k in [1, 10].
[[nodiscard]] std::vector<Lnc2Trial> random_lnc2_trials(InvertedIndex const& index,
                                                        ForwardIndex const& forward,
                                                        std::size_t count,
                                                        std::uint64_t seed);

enum class LengthKind { tokens, types };

struct LengthBin {
    std::uint64_t min_length = 0;
    std::uint64_t max_length = 0;
    std::size_t documents = 0;
    double p_retrieved = 0.0;  // P(bin | retrieved in the top 1000)
    double p_relevant = 0.0;   // P(bin | relevant)
};

struct LengthBinCurve {
    LengthKind kind = LengthKind::tokens;
    std::vector<LengthBin> bins;
};

/// Sorts the collection by length, cuts it into n_bins bins of (near) equal
/// document count, and distributes (topic, document) pairs that are retrieved
/// or relevant over the bins. Throws UsageError for n_bins < 2 or too few
/// retrieved documents, DataError for empty qrels or run documents that are
/// not in the index.
[[nodiscard]] LengthBinCurve length_bin_analysis(RunFile const& run,
                                                 Qrels const& qrels,
                                                 InvertedIndex const& index,
                                                 std::size_t n_bins = 50,
                                                 LengthKind kind = LengthKind::tokens);

void write_length_bins_csv(std::ostream& out, LengthBinCurve const& curve);

struct BackgroundRatioRow {
    std::string term;
    double p_multinomial = 0.0;  // cf_t / |c|
    double p_dcm = 0.0;          // df_t / Σ|d⃗_j|
    double ratio = 0.0;          // p_dcm / p_multinomial
};

struct BackgroundRatioTable {
    std::vector<BackgroundRatioRow> top;     // highest ratio first
    std::vector<BackgroundRatioRow> bottom;  // lowest ratio first
};

[[nodiscard]] BackgroundRatioRow background_ratio(InvertedIndex const& index, PostingsList const& term);

/// Ratios for `terms` (every indexed term when empty). Unknown terms are
/// skipped. Ties are broken by term.
[[nodiscard]] BackgroundRatioTable background_ratio_table(InvertedIndex const& index,
                                                          std::span<std::string const> terms,
                                                          std::size_t top_n);

struct IdfPoint {
    std::uint64_t df = 0;
    double spud_weight = 0.0;    // log(1 + delta·n/df)
    double classic_idf = 0.0;    // log(n/df)
};

/// Throws UsageError unless delta > 0 and every df lies in [1, n].
[[nodiscard]] std::vector<IdfPoint> idf_family_curve(std::uint64_t n, double delta, std::span<std::uint64_t const> dfs);

/// Every df for small n, otherwise ~200 log-spaced values including 1 and n.
[[nodiscard]] std::vector<std::uint64_t> default_df_range(std::uint64_t n);

void write_idf_curve_csv(std::ostream& out, std::vector<IdfPoint> const& curve);

}  // namespace spud
