// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "oracles.hpp"
#include "spud/diagnostics.hpp"
#include "spud/errors.hpp"
#include "spud/estimation.hpp"
#include "spud/evaluation.hpp"
#include "spud/feedback.hpp"
#include "spud/ranking.hpp"

using namespace spud;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, std::string const& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(fs::path const& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string random_query(std::mt19937_64& rng, std::size_t vocab, int len) {
    std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
    std::string text;
    for (int i = 0; i < len; ++i) {
        text += testing::term_name(pick(rng)) + " ";
    }
    return text;
}

// 1 -------------------------------------------------------------------------

Check toy_background() {
    Check c;
    auto idx = testing::toy_index();
    auto const& s = idx.stats();
    auto const* t1 = idx.term_lookup("t1");
    auto const* t2 = idx.term_lookup("t2");
    // exact rationals by cross-multiplication
    c.require(t1->cf * 15 == 8 * s.total_tokens, "multinomial p(t1) != 8/15");
    c.require(t2->cf * 15 == 7 * s.total_tokens, "multinomial p(t2) != 7/15");
    c.require(t1->df * 5 == 1 * s.sum_vector_lengths, "DCM p(t1) != 1/5");
    c.require(t2->df * 5 == 4 * s.sum_vector_lengths, "DCM p(t2) != 4/5");
    auto r1 = background_ratio(idx, *t1);
    auto r2 = background_ratio(idx, *t2);
    c.require(r1.p_multinomial == 8.0 / 15 && r2.p_multinomial == 7.0 / 15, "library multinomial background");
    c.require(r1.p_dcm == 1.0 / 5 && r2.p_dcm == 4.0 / 5, "library DCM background");
    c.detail = c.ok ? "8/15, 7/15, 1/5, 4/5" : c.detail;
    return c;
}

// 2 -------------------------------------------------------------------------

Check rank_equivalence() {
    Check c;
    auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::size_t corpora = 0;
    std::size_t queries = 0;
    double worst_gap = 0;
    std::size_t rounding_ties = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testing::SyntheticParams p;
        p.docs = std::uniform_int_distribution<std::size_t>(10, 500)(rng);
        p.vocab = std::uniform_int_distribution<std::size_t>(10, 200)(rng);
        p.max_len = std::uniform_int_distribution<std::size_t>(5, 120)(rng);
        p.concentration = std::uniform_real_distribution<double>(2, 200)(rng);
        auto idx = testing::index_of(testing::polya_corpus(p, 1000 + seed).docs);
        ++corpora;
        double mu = std::uniform_real_distribution<double>(50, 3000)(rng);
        std::vector<ModelConfig> cfgs{ModelConfig::spud_jm(), ModelConfig::spud_dir(mu), ModelConfig::mql_dir(mu)};
        for (int qi = 0; qi < 5; ++qi) {
            auto q = prepare_query(random_query(rng, p.vocab, 1 + qi % 4), idx);
            if (q.empty()) {
                continue;
            }
            ++queries;
            for (auto const& cfg : cfgs) {
                std::vector<ScoredDoc> eff;
                std::vector<ScoredDoc> prob;
                for (DocOrdinal d = 0; d < idx.num_docs(); ++d) {
                    auto ev = gather_evidence(q, idx, d);
                    auto f = features_of(idx.doc(d));
                    eff.push_back({idx.doc(d).doc_id, d, score_efficient(cfg, idx.stats(), f, ev)});
                    prob.push_back({idx.doc(d).doc_id, d, score_probability(cfg, idx.stats(), f, ev)});
                }
                for (std::size_t i = 1; i < eff.size(); ++i) {
                    double gap = std::fabs((eff[i].score - eff[0].score) - (prob[i].score - prob[0].score));
                    worst_gap = std::max(worst_gap, gap);
                }
                // Walk the efficient-form ranking and require the probability
                // form to be non-increasing along it. Documents whose scores
                // are mathematically tied may differ in the last bit between
                // the two forms, so a reversal within rounding is a tie.
                std::vector<double> by_ordinal(prob.size());
                for (auto const& s : prob) {
                    by_ordinal[s.ordinal] = s.score;
                }
                std::sort(eff.begin(), eff.end(), ranks_before);
                for (std::size_t i = 0; i + 1 < eff.size(); ++i) {
                    double hi = by_ordinal[eff[i].ordinal];
                    double lo = by_ordinal[eff[i + 1].ordinal];
                    bool tied = std::fabs(hi - lo) <= 1e-12 * std::max(1.0, std::fabs(hi));
                    if (!(hi >= lo) && tied) {
                        ++rounding_ties;
                    }
                    c.require(hi >= lo || tied,
                              fmt::format("{} ranking differs at rank {} (corpus {})", model_name(cfg.model()), i + 1, seed));
                }
            }
        }
    }
    double secs = seconds_since(t0);
    c.require(worst_gap <= 1e-9, fmt::format("pairwise gap mismatch {:.3e}", worst_gap));
    c.require(secs < 60, fmt::format("took {:.1f}s", secs));
    if (c.ok) {
        c.detail = fmt::format("{} corpora, {} queries, max gap diff {:.2e}, {} last-bit ties, {:.1f}s", corpora,
                               queries, worst_gap, rounding_ties, secs);
    }
    return c;
}

// 3 -------------------------------------------------------------------------

Check lnc2() {
    Check c;
    auto t0 = Clock::now();
    testing::SyntheticParams p;
    p.docs = 300;
    p.vocab = 150;
    p.max_len = 80;
    auto idx = testing::index_of(testing::polya_corpus(p, 77).docs);
    ForwardIndex fwd(idx);
    auto trials = random_lnc2_trials(idx, fwd, 1000, 12345);
    c.require(trials.size() == 1000, "expected 1000 trials");

    auto spud = check_lnc2(idx.stats(), ModelConfig::spud_dir(1000), trials);
    auto lm3 = check_lnc2(idx.stats(), ModelConfig::lm3(1000), trials);
    auto mql = check_lnc2(idx.stats(), ModelConfig::mql_dir(1000), trials);
    auto lm2 = check_lnc2(idx.stats(), ModelConfig::lm2(1000), trials);
    c.require(spud.max_abs_delta <= 1e-12, fmt::format("SPUD_DIR max delta {:.3e}", spud.max_abs_delta));
    c.require(lm3.max_abs_delta <= 1e-12, fmt::format("LM3 max delta {:.3e}", lm3.max_abs_delta));
    c.require(mql.witness.has_value(), "no MQL_DIR witness");
    c.require(lm2.witness.has_value(), "no LM2 witness");

    // Equal rates: c(t,d)/|d| equals the model's background rate for every query term.
    CollectionStats stats{.n = 100, .total_tokens = 1000, .vocab_size = 50, .sum_vector_lengths = 400};
    std::vector<Lnc2Trial> mql_equal;
    std::vector<Lnc2Trial> lm2_equal;
    for (std::uint32_t k = 1; k <= 10; ++k) {
        // 2/40 = 50/1000 and 2/40 = 20/400; 6/40 = 150/1000 and 6/40 = 60/400
        mql_equal.push_back({{{1, 2, 50, 7}, {2, 6, 150, 9}}, {40, 12}, k, "mql-equal"});
        lm2_equal.push_back({{{1, 2, 13, 20}, {2, 6, 31, 60}}, {40, 12}, k, "lm2-equal"});
    }
    for (double mu : {10.0, 1000.0, 2500.0}) {
        auto m = check_lnc2(stats, ModelConfig::mql_dir(mu), mql_equal);
        auto l = check_lnc2(stats, ModelConfig::lm2(mu), lm2_equal);
        c.require(m.satisfied, fmt::format("MQL_DIR equal-rates violation {:.3e}", m.max_abs_delta));
        c.require(l.satisfied, fmt::format("LM2 equal-rates violation {:.3e}", l.max_abs_delta));
    }
    double secs = seconds_since(t0);
    c.require(secs < 30, fmt::format("took {:.1f}s", secs));
    if (c.ok) {
        c.detail = fmt::format("SPUD_DIR {:.1e}, LM3 {:.1e}, MQL_DIR witness {}, LM2 witness {}, {:.1f}s",
                               spud.max_abs_delta, lm3.max_abs_delta, trials[*mql.witness].label,
                               trials[*lm2.witness].label, secs);
    }
    return c;
}

// 4 -------------------------------------------------------------------------

Check exact_identities() {
    Check c;
    std::size_t lm4_cases = 0;
    std::size_t lm3_cases = 0;
    std::vector<CollectionStats> collections{
        {.n = 4, .total_tokens = 15, .vocab_size = 2, .sum_vector_lengths = 5},
        {.n = 50, .total_tokens = 900, .vocab_size = 120, .sum_vector_lengths = 400},
        {.n = 1000, .total_tokens = 250000, .vocab_size = 9000, .sum_vector_lengths = 90000},
    };
    std::vector<double> params{0.5, 1, 10, 258, 1000, 2500};
    // Single-term evidence over every feasible small document.
    for (auto const& s : collections) {
        for (std::uint64_t len = 1; len <= 12; ++len) {
            for (std::uint64_t types = 1; types <= len; ++types) {
                for (std::uint64_t tf = 0; tf <= len - types + 1; ++tf) {
                    for (std::uint64_t cf : {std::uint64_t{1}, std::uint64_t{3}, std::uint64_t{14}}) {
                        for (std::uint64_t df : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{4}}) {
                            for (std::uint64_t qc : {std::uint64_t{1}, std::uint64_t{3}}) {
                                if (tf > cf || df > cf || df > s.n) {
                                    continue;
                                }
                                std::vector<TermEvidence> ev{{qc, tf, cf, df}};
                                DocFeatures doc{len, types};
                                for (double u : params) {
                                    ++lm4_cases;
                                    c.require(score_lm4(u, s, doc, ev) == score_efficient(ModelConfig::spud_dir(u), s, doc, ev),
                                              fmt::format("LM4 != SPUD_DIR at |d|={} |d⃗|={} tf={}", len, types, tf));
                                    if (types == len && tf <= 1) {
                                        DocFeatures distinct{len, len};
                                        ++lm3_cases;
                                        c.require(score_efficient(ModelConfig::lm3(u), s, distinct, ev)
                                                      == score_efficient(ModelConfig::mql_dir(u), s, distinct, ev),
                                                  fmt::format("LM3 != MQL_DIR at |d|={} tf={}", len, tf));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // Indexed small corpora: every query of up to two terms against every document.
    auto toy = testing::toy_index();
    std::vector<std::vector<std::string>> distinct{{"a", "b", "c"}, {"b", "d"}, {"a", "c", "d", "e"}, {"e"}, {"f", "a"}};
    auto didx = testing::index_of(distinct);
    std::vector<std::string> toy_q{"t1", "t2", "t1 t2", "t1 t1", "t2 t2", "t2 t1 t2"};
    std::vector<std::string> distinct_q;
    for (auto const* a : {"a", "b", "c", "d", "e", "f"}) {
        for (auto const* b : {"", "a", "b", "c", "d", "e", "f"}) {
            distinct_q.push_back(std::string(a) + " " + b);
        }
    }
    for (double u : params) {
        for (auto const& text : toy_q) {
            auto q = prepare_query(text, toy);
            for (DocOrdinal d = 0; d < toy.num_docs(); ++d) {
                ++lm4_cases;
                c.require(score_lm4(q, d, toy, u) == score_spud_dir(q, d, toy, u), "indexed LM4 != SPUD_DIR");
            }
        }
        for (auto const& text : distinct_q) {
            auto q = prepare_query(text, didx);
            for (DocOrdinal d = 0; d < didx.num_docs(); ++d) {
                ++lm3_cases;
                ++lm4_cases;
                c.require(score_lm3(q, d, didx, u) == score_mql_dir(q, d, didx, u), "indexed LM3 != MQL_DIR");
                c.require(score_lm4(q, d, didx, u) == score_spud_dir(q, d, didx, u), "indexed LM4 != SPUD_DIR");
            }
        }
    }
    if (c.ok) {
        c.detail = fmt::format("{} LM4/SPUD_DIR cases, {} LM3/MQL_DIR cases, all bit-equal", lm4_cases, lm3_cases);
    }
    return c;
}

// 5 -------------------------------------------------------------------------

Check newton_estimator() {
    Check c;
    std::size_t max_iters = 0;
    double worst_residual = 0;
    double worst_rel = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        testing::SyntheticParams p;
        p.docs = 50 + 25 * seed;
        p.vocab = 200;
        p.min_len = 3;
        p.max_len = 150;
        p.concentration = 5.0 * double(seed * seed);
        auto idx = testing::index_of(testing::polya_corpus(p, 500 + seed).docs);
        std::vector<DocLengths> lengths;
        double avg = 0;
        for (auto const& d : idx.docs()) {
            lengths.push_back({d.length_tokens, d.length_types});
            avg += d.length_tokens;
        }
        avg /= double(lengths.size());
        auto est = estimate_mc(idx, McOptions{.init = 200, .tol = 1e-8, .max_iter = 100});
        c.require(est.converged, fmt::format("seed {} did not converge", seed));
        max_iters = std::max(max_iters, est.iterations);
        worst_residual = std::max(worst_residual, std::fabs(est.residual));
        double grid = testing::edcm_grid_search(lengths, 10 * avg);
        worst_rel = std::max(worst_rel, std::fabs(est.m_c - grid) / grid);
    }
    c.require(max_iters <= 100, "more than 100 iterations");
    c.require(worst_residual < 1e-6, fmt::format("residual {:.3e}", worst_residual));
    c.require(worst_rel < 0.01, fmt::format("grid-search disagreement {:.3e}", worst_rel));

    double worst_psi = 0;
    for (int i = 0; i <= 200; ++i) {
        double x = std::pow(10.0, -3.0 + 8.0 * i / 200);
        double oracle = double(testing::digamma_quadrature(x));
        worst_psi = std::max(worst_psi, std::fabs(digamma(x) - oracle) / std::max(1.0, std::fabs(oracle)));
    }
    c.require(worst_psi <= 1e-10, fmt::format("digamma error {:.3e}", worst_psi));
    if (c.ok) {
        c.detail = fmt::format("<= {} iterations, residual {:.1e}, grid rel diff {:.1e}, digamma err {:.1e}", max_iters,
                               worst_residual, worst_rel, worst_psi);
    }
    return c;
}

// 6 -------------------------------------------------------------------------

Check mu_prime() {
    Check c;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> exponent(-8, 12);
    std::size_t n = 0;
    for (int i = 0; i < 100000; ++i) {
        double m = std::pow(10.0, exponent(rng));
        ++n;
        c.require(derive_mu_prime(0.8, m) == 4 * m, fmt::format("derive_mu_prime(0.8, {}) != {}", m, 4 * m));
    }
    for (double m : {1.0, 258.0, 1e-300, 1e300}) {
        ++n;
        c.require(derive_mu_prime(0.8, m) == 4 * m, fmt::format("derive_mu_prime(0.8, {})", m));
    }
    if (c.ok) {
        c.detail = fmt::format("{} values, m_c=258 -> {}", n, derive_mu_prime(0.8, 258));
    }
    return c;
}

// 7 -------------------------------------------------------------------------

struct MetricCase {
    std::vector<std::string> ranking;
    std::map<std::string, int> grades;
    double ap;
    double ndcg20;
    double recall;
};

std::vector<MetricCase> metric_fixtures() {
    auto d = [](double r) { return 1.0 / std::log2(r + 1); };
    std::vector<std::string> long_run;
    for (int i = 0; i < 1200; ++i) {
        long_run.push_back("n" + std::to_string(i));
    }
    auto late = long_run;
    late[4] = "r1";
    late[999] = "r2";
    late[1000] = "r3";  // beyond the cutoff
    return {
        // ideal
        {{"a"}, {{"a", 1}}, 1, 1, 1},
        {{"a", "b", "c"}, {{"a", 1}, {"b", 1}, {"c", 1}}, 1, 1, 1},
        {{"a", "b", "x", "y"}, {{"a", 1}, {"b", 1}}, 1, 1, 1},
        // empty ranking
        {{}, {{"a", 1}}, 0, 0, 0},
        {{}, {{"a", 1}, {"b", 2}}, 0, 0, 0},
        // nothing relevant retrieved
        {{"x", "y"}, {{"a", 1}}, 0, 0, 0},
        {{"x", "y", "z"}, {{"a", 1}, {"x", 0}}, 0, 0, 0},
        // partial
        {{"a", "x", "b"}, {{"a", 1}, {"b", 1}}, 5.0 / 6, (d(1) + d(3)) / (d(1) + d(2)), 1},
        {{"x", "a"}, {{"a", 1}}, 0.5, d(2), 1},
        {{"x", "a"}, {{"a", 1}, {"b", 1}}, 0.25, d(2) / (d(1) + d(2)), 0.5},
        {{"a", "x", "c", "d"}, {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}, (1 + 2.0 / 3 + 3.0 / 4) / 4,
         (d(1) + d(3) + d(4)) / (d(1) + d(2) + d(3) + d(4)), 0.75},
        {{"x", "y", "a", "b"}, {{"a", 1}, {"b", 1}}, (1.0 / 3 + 2.0 / 4) / 2, (d(3) + d(4)) / (d(1) + d(2)), 1},
        // graded
        {{"b", "a"}, {{"a", 2}, {"b", 1}}, 1, (1 * d(1) + 2 * d(2)) / (2 * d(1) + 1 * d(2)), 1},
        {{"a", "b"}, {{"a", 2}, {"b", 1}}, 1, 1, 1},
        {{"c", "x", "a"}, {{"a", 3}, {"b", 1}, {"c", 1}}, (1 + 2.0 / 3) / 3, (1 * d(1) + 3 * d(3)) / (3 * d(1) + d(2) + d(3)),
         2.0 / 3},
        // non-positive grades are not relevant
        {{"a", "b"}, {{"a", 0}, {"b", 1}}, 0.5, d(2), 1},
        {{"a", "b"}, {{"a", -1}, {"b", 1}}, 0.5, d(2), 1},
        // beyond NDCG depth: relevant only at rank 21
        {[] {
             std::vector<std::string> v;
             for (int i = 0; i < 20; ++i) {
                 v.push_back("n" + std::to_string(i));
             }
             v.push_back("a");
             return v;
         }(),
         {{"a", 1}}, 1.0 / 21, 0, 1},
        // recall and AP cutoff at 1000
        {late, {{"r1", 1}, {"r2", 1}, {"r3", 1}}, (1.0 / 5 + 2.0 / 1000) / 3, d(5) / (d(1) + d(2) + d(3)), 2.0 / 3},
        // unjudged documents count as non-relevant
        {{"u1", "a", "u2", "b"}, {{"a", 1}, {"b", 1}, {"z", 0}}, (0.5 + 0.5) / 2, (d(2) + d(4)) / (d(1) + d(2)), 1},
    };
}

Check metric_oracles() {
    Check c;
    auto fixtures = metric_fixtures();
    c.require(fixtures.size() == 20, "expected 20 fixtures");
    double worst = 0;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        auto const& f = fixtures[i];
        std::set<std::string> rel;
        for (auto const& [doc, g] : f.grades) {
            if (g > 0) {
                rel.insert(doc);
            }
        }
        auto ap = average_precision(f.ranking, rel);
        auto nd = ndcg_at_k(f.ranking, f.grades);
        auto rc = recall_at_k(f.ranking, rel);
        c.require(ap && nd && rc, fmt::format("fixture {} has no value", i));
        if (!(ap && nd && rc)) {
            continue;
        }
        for (auto [got, want] : {std::pair{*ap, f.ap}, std::pair{*nd, f.ndcg20}, std::pair{*rc, f.recall}}) {
            worst = std::max(worst, std::fabs(got - want));
            c.require(std::fabs(got - want) <= 1e-12, fmt::format("fixture {}: {} vs {}", i, got, want));
        }
    }

    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.01, 0.05);
    double worst_p = 0;
    for (std::size_t n = 2; n <= 50; ++n) {
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<double> a(n);
            std::vector<double> b(n);
            for (std::size_t i = 0; i < n; ++i) {
                b[i] = std::uniform_real_distribution<double>(0, 1)(rng);
                a[i] = b[i] + noise(rng);
            }
            auto r = paired_ttest(a, b);
            double oracle = testing::t_pvalue_quadrature(r.t_statistic, double(n - 1));
            worst_p = std::max(worst_p, std::fabs(r.p_value - oracle));
        }
    }
    c.require(worst_p <= 1e-6, fmt::format("t-test p error {:.3e}", worst_p));

    std::vector<double> same{0.2, 0.4, 0.6};
    auto z = paired_ttest(same, same);
    c.require(z.p_value == 1.0 && z.mean_diff == 0.0, "identical vectors must give p = 1");
    std::vector<double> shifted{0.3, 0.5, 0.7};
    auto inf = paired_ttest(shifted, same);
    c.require(inf.degenerate && inf.p_value == 0.0 && std::isinf(inf.t_statistic), "constant shift convention");
    if (c.ok) {
        c.detail = fmt::format("20 fixtures max err {:.1e}, t-test max p err {:.1e} for n=2..50", worst, worst_p);
    }
    return c;
}

// 8 -------------------------------------------------------------------------

struct PlantedCollection {
    InvertedIndex index;
    std::vector<Topic> topics;
    Qrels qrels;
};

PlantedCollection planted_collection() {
    testing::SyntheticParams p;
    p.docs = 2000;
    p.vocab = 500;
    p.max_len = 150;
    p.concentration = 50;
    auto corpus = testing::polya_corpus(p, 808);
    std::mt19937_64 rng(9);
    std::vector<Topic> topics;
    std::string qrels_text;
    for (int t = 0; t < 25; ++t) {
        // Plant a pair of rare topic terms into a random 1% of the documents.
        std::string a = "topic" + std::to_string(t) + "a";
        std::string b = "topic" + std::to_string(t) + "b";
        std::uniform_int_distribution<std::size_t> pick(0, corpus.docs.size() - 1);
        for (int r = 0; r < 20; ++r) {
            auto d = pick(rng);
            corpus.docs[d].insert(corpus.docs[d].end(), {a, a, b});
            qrels_text += fmt::format("q{} 0 doc{} 1\n", t, 1000000 + d);
        }
        // and scatter single mentions elsewhere as noise
        for (int r = 0; r < 40; ++r) {
            corpus.docs[pick(rng)].push_back(r % 2 ? a : b);
        }
        topics.push_back({fmt::format("q{}", t), a + " " + b + " " + testing::term_name(std::size_t(t))});
    }
    // repeated pairs collapse to one judgement
    std::istringstream lines(qrels_text);
    std::set<std::string> unique;
    std::string line;
    std::string dedup;
    while (std::getline(lines, line)) {
        if (unique.insert(line).second) {
            dedup += line + "\n";
        }
    }
    return {testing::index_of(corpus.docs), topics, parse_qrels(dedup)};
}

Check sweep_protocol() {
    Check c;
    auto t0 = Clock::now();
    auto col = planted_collection();
    auto grid = default_grid(Model::lm2);
    c.require(grid.size() == 10 && grid.front() == 250 && grid.back() == 2500, "grid is not 250..2500");
    auto result = sweep(col.index, Model::lm2, grid, col.topics, col.qrels, 1000);
    c.require(result.rows.size() == grid.size(), "one row per grid point");
    for (std::size_t i = 0; i < result.rows.size() && c.ok; ++i) {
        auto const& row = result.rows[i];
        c.require(row.report.has_value(), fmt::format("grid point {} failed: {}", row.param, row.error));
        if (!row.report) {
            break;
        }
        auto run = run_topics(col.index, ModelConfig::lm2(grid[i]), col.topics, 1000, "single");
        // Round trip through the interchange format like a separate invocation.
        auto single = evaluate(parse_run(format_run(run)), col.qrels);
        c.require(row.report->per_topic.size() == col.topics.size(), "per-topic metrics not retained");
        c.require(row.report->per_topic.size() == single.per_topic.size(), "topic count differs");
        for (std::size_t t = 0; t < single.per_topic.size() && c.ok; ++t) {
            auto const& a = row.report->per_topic[t];
            auto const& b = single.per_topic[t];
            c.require(a.topic == b.topic && a.ap == b.ap && a.ndcg20 == b.ndcg20 && a.recall1000 == b.recall1000,
                      fmt::format("U={} topic {} differs", grid[i], a.topic));
        }
        c.require(row.report->map == single.map, fmt::format("U={} MAP differs", grid[i]));
    }
    double secs = seconds_since(t0);
    c.require(secs < 120, fmt::format("took {:.1f}s", secs));
    if (c.ok) {
        c.detail = fmt::format("10 rows, MAP {:.4f}..{:.4f}, {:.1f}s", result.rows.front().report->map,
                               result.rows.back().report->map, secs);
    }
    return c;
}

// 9 -------------------------------------------------------------------------

Check feedback() {
    Check c;
    testing::SyntheticParams p;
    p.docs = 400;
    p.vocab = 150;
    auto idx = testing::index_of(testing::polya_corpus(p, 909).docs);
    ForwardIndex fwd(idx);
    std::mt19937_64 rng(10);
    double worst_norm = 0;
    for (auto variant : {FeedbackVariant::purm, FeedbackVariant::rm3}) {
        auto cfg = variant == FeedbackVariant::purm ? ModelConfig::spud_dir(2000) : ModelConfig::mql_dir(2000);
        for (int i = 0; i < 20; ++i) {
            auto q = prepare_query(random_query(rng, p.vocab, 1 + i % 3), idx);
            if (q.empty()) {
                continue;
            }
            auto first = retrieve(q, idx, cfg, 1000);
            FeedbackConfig fc;
            fc.variant = variant;
            auto e = expansion_model(q, idx, fwd, first.docs, fc);
            worst_norm = std::max(worst_norm, std::fabs(e.model.total() - 1.0));
            for (double tau : {0.0, 0.3, 0.5}) {
                worst_norm = std::max(worst_norm, std::fabs(smooth_query(q, e.model, tau).total() - 1.0));
            }
            auto second = rerank_with_model(smooth_query(q, e.model, 1.0), idx, cfg, 1000);
            bool same = second.docs.size() == first.docs.size();
            for (std::size_t r = 0; same && r < first.docs.size(); ++r) {
                same = second.docs[r].doc_id == first.docs[r].doc_id;
            }
            c.require(same, fmt::format("tau=1 changed the {} ranking", variant_name(variant)));
        }
    }
    c.require(worst_norm <= 1e-9, fmt::format("normalisation error {:.3e}", worst_norm));

    // Identical scorer outputs: all-distinct documents with mu = mu'.
    std::vector<std::vector<std::string>> docs;
    for (std::size_t d = 0; d < 60; ++d) {
        std::vector<std::string> toks;
        for (std::size_t t = 0; t < 60; ++t) {
            if ((t * 7 + d * 3) % 5 == 0 || (t + d) % 11 == 0) {
                toks.push_back(testing::term_name(t));
            }
        }
        docs.push_back(toks);
    }
    auto didx = testing::index_of(docs);
    ForwardIndex dfwd(didx);
    for (int i = 0; i < 10; ++i) {
        auto q = prepare_query(random_query(rng, 60, 2), didx);
        if (q.empty()) {
            continue;
        }
        auto a = retrieve(q, didx, ModelConfig::spud_dir(300), 20);
        auto b = retrieve(q, didx, ModelConfig::mql_dir(300), 20);
        bool equal_scores = a.docs.size() == b.docs.size();
        for (std::size_t r = 0; equal_scores && r < a.docs.size(); ++r) {
            equal_scores = a.docs[r].score == b.docs[r].score && a.docs[r].doc_id == b.docs[r].doc_id;
        }
        c.require(equal_scores, "construction did not give identical scores");
        FeedbackConfig fc;
        fc.weighting_param = 300;
        fc.variant = FeedbackVariant::purm;
        auto purm = expansion_model(q, didx, dfwd, a.docs, fc);
        fc.variant = FeedbackVariant::rm3;
        auto rm3 = expansion_model(q, didx, dfwd, b.docs, fc);
        c.require(purm.model.weights == rm3.model.weights, "PURM and RM3 differ under identical scores");
    }
    if (c.ok) {
        c.detail = fmt::format("tau=1 rankings identical, PURM==RM3 on equal scores, norm err {:.1e}", worst_norm);
    }
    return c;
}

// 10 / 11 -------------------------------------------------------------------

int run_cli(std::string const& args, fs::path const& out, fs::path const& err) {
    auto cmd = fmt::format("'{}' {} > '{}' 2> '{}'", SPUD_CLI_PATH, args, out.string(), err.string());
    return std::system(cmd.c_str());
}

fs::path scratch() {
    auto dir = fs::temp_directory_path() / ("spud_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_toy_files(fs::path const& dir) {
    std::ofstream c(dir / "corpus.jsonl");
    c << R"({"id":"d1","text":"t1 t1 t1 t1 t1 t1 t1 t1 t2 t2"})" << "\n"
      << R"({"id":"d2","text":"t2"})" << "\n"
      << R"({"id":"d3","text":"t2 t2 t2"})" << "\n"
      << R"({"id":"d4","text":"t2"})" << "\n";
    std::ofstream t(dir / "topics.jsonl");
    t << R"({"id":"1","text":"t1"})" << "\n"
      << R"({"id":"2","text":"t2"})" << "\n"
      << R"({"id":"3","text":"t1 t2"})" << "\n";
    std::ofstream q(dir / "qrels.txt");
    q << "1 0 d1 1\n2 0 d3 1\n2 0 d2 1\n3 0 d1 1\n";
}

Check spud_jm_parameter_free(fs::path const& dir) {
    Check c;
    c.require(!takes_parameter(Model::spud_jm), "spud_jm reports a parameter");
    bool rejected = false;
    try {
        (void)ModelConfig::make(Model::spud_jm, 0.5);
    } catch (UsageError const&) {
        rejected = true;
    }
    c.require(rejected, "spud_jm accepted a parameter");
    c.require(!ModelConfig::make(Model::spud_jm, std::nullopt).parameter().has_value(), "spud_jm config has a parameter");

    auto d = dir / "jm";
    fs::create_directories(d);
    write_toy_files(d);
    auto p = [&](char const* n) { return (d / n).string(); };
    c.require(run_cli(fmt::format("index --corpus '{}' --out '{}'", p("corpus.jsonl"), p("idx")), d / "o", d / "e") == 0,
              "index failed");
    c.require(run_cli(fmt::format("run --index '{}' --model spud_jm --param 1 --topics '{}' --out '{}'", p("idx"),
                                  p("topics.jsonl"), p("x.run")),
                      d / "o", d / "e")
                  != 0,
              "CLI accepted --param for spud_jm");
    for (char const* name : {"a.run", "b.run"}) {
        c.require(run_cli(fmt::format("run --index '{}' --model spud_jm --topics '{}' --out '{}'", p("idx"),
                                      p("topics.jsonl"), p(name)),
                          d / "o", d / "e")
                      == 0,
                  "run failed");
    }
    auto a = slurp(d / "a.run");
    c.require(!a.empty(), "empty run file");
    c.require(a == slurp(d / "b.run"), "run files differ");
    if (c.ok) {
        c.detail = fmt::format("no parameter accepted; {} deterministic run lines", std::count(a.begin(), a.end(), '\n'));
    }
    return c;
}

Check end_to_end(fs::path const& dir) {
    Check c;
    std::vector<std::string> outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
        auto d = dir / fmt::format("e2e{}", rep);
        fs::create_directories(d);
        write_toy_files(d);
        auto p = [&](std::string const& n) { return (d / n).string(); };
        c.require(run_cli(fmt::format("index --corpus '{}' --out '{}'", p("corpus.jsonl"), p("idx")), d / "index.out",
                          d / "index.err")
                      == 0,
                  "index failed");
        for (auto const* model : {"spud_dir --param 10", "mql_dir --param 100", "spud_jm"}) {
            auto name = std::string(model).substr(0, std::string(model).find(' '));
            c.require(run_cli(fmt::format("run --index '{}' --model {} --topics '{}' --out '{}'", p("idx"), model,
                                          p("topics.jsonl"), p(name + ".run")),
                              d / "run.out", d / "run.err")
                          == 0,
                      "run failed");
            c.require(run_cli(fmt::format("eval --run '{}' --qrels '{}' --per-query", p(name + ".run"), p("qrels.txt")),
                              d / (name + ".eval"), d / "eval.err")
                          == 0,
                      "eval failed");
            outputs[rep].push_back(slurp(d / (name + ".run")));
            outputs[rep].push_back(slurp(d / (name + ".eval")));
        }
        for (auto const* f : {"manifest.json", "dictionary.bin", "postings.bin", "docs.bin"}) {
            outputs[rep].push_back(slurp(d / "idx" / f));
        }
        outputs[rep].push_back(slurp(d / "index.out"));
    }
    c.require(outputs[0].size() == outputs[1].size(), "different number of artefacts");
    for (std::size_t i = 0; i < outputs[0].size(); ++i) {
        c.require(!outputs[0][i].empty(), fmt::format("artefact {} is empty", i));
        c.require(outputs[0][i] == outputs[1][i], fmt::format("artefact {} differs", i));
    }
    if (c.ok) {
        c.detail = fmt::format("{} artefacts byte-identical across two pipelines", outputs[0].size());
    }
    return c;
}

}  // namespace

int main() {
    auto dir = scratch();
    std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"toy background model", toy_background},
        {"probability/efficient rank equivalence", rank_equivalence},
        {"LNC2* invariance and violation witnesses", lnc2},
        {"LM4 == SPUD_DIR, LM3 == MQL_DIR on distinct docs", exact_identities},
        {"m_c estimator and digamma", newton_estimator},
        {"mu' = 4 m_c at omega 0.8", mu_prime},
        {"metric and t-test oracles", metric_oracles},
        {"sweep protocol", sweep_protocol},
        {"feedback properties", feedback},
        {"SPUD_JM parameter-free end to end", [&] { return spud_jm_parameter_free(dir); }},
        {"end-to-end determinism", [&] { return end_to_end(dir); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].second();
        } catch (std::exception const& e) {
            c.ok = false;
            c.detail = fmt::format("exception: {}", e.what());
        }
        failures += c.ok ? 0 : 1;
        fmt::print("{} [{:2}] {}: {}\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail);
        std::fflush(stdout);
    }
    fs::remove_all(dir);
    fmt::print("{} of {} criteria passed\n", criteria.size() - std::size_t(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
