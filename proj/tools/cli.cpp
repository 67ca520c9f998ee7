#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "spud/corpus.hpp"
#include "spud/diagnostics.hpp"
#include "spud/errors.hpp"
#include "spud/estimation.hpp"
#include "spud/evaluation.hpp"
#include "spud/feedback.hpp"
#include "spud/index.hpp"
#include "spud/ranking.hpp"
#include "spud/textprep.hpp"

namespace spud::cli {

namespace {

using json = nlohmann::json;

constexpr char const* stopwords_env = "SPUD_STOPWORDS";

struct Options {
    std::size_t threads = 1;

    // index
    std::string corpus;
    std::string out;
    std::string stopwords;
    bool no_stem = false;

    // shared
    std::string index;
    std::string model;
    std::optional<double> param;
    std::string topics;
    std::string qrels;
    std::string tag = "spud";
    std::size_t depth = 1000;
    bool json_output = false;

    // search
    std::string query;
    std::size_t k = 10;

    // eval / sigtest
    std::string run;
    bool per_query = false;
    std::string run_a;
    std::string run_b;
    std::string metric = "map";

    // sweep
    std::string grid;
    std::string per_query_out;

    // estimate-mc
    double init = 200.0;
    double tol = 1e-8;
    std::size_t max_iter = 100;

    // expand
    std::string variant = "purm";
    std::size_t fb_docs = 20;
    std::size_t fb_terms = 50;
    double tau = 0.5;
    double expansion_mu = 0.0;

    // diagnose
    std::size_t trials = 1000;
    std::optional<std::uint64_t> seed;
    std::size_t bins = 50;
    std::string length_kind = "tokens";
    std::size_t top = 10;
    double delta = 0.1;
    std::optional<std::uint64_t> n_docs;
};

ModelConfig resolve_model(Options const& o) {
    auto model = parse_model(o.model);
    if (!model) {
        throw UsageError(fmt::format("unknown model '{}'", o.model));
    }
    return ModelConfig::make(*model, o.param);
}

std::ofstream open_output(std::string const& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("cannot write {}", path));
    }
    return out;
}

void print_config(CLI::App const& sub, std::string const& name, std::ostream& err) {
    json config;
    config["subcommand"] = name;
    for (auto const* opt : sub.get_options()) {
        auto key = opt->get_lnames().empty() ? opt->get_single_name() : opt->get_lnames().front();
        if (key == "help") {
            continue;
        }
        if (opt->count() > 0) {
            auto const& results = opt->results();
            config[key] = results.size() == 1 ? json(results.front()) : json(results);
        } else if (!opt->get_default_str().empty()) {
            config[key] = opt->get_default_str();
        } else if (opt->get_expected_min() == 0) {
            config[key] = false;
        } else {
            config[key] = nullptr;
        }
    }
    fmt::print(err, "config: {}\n", config.dump());
}

TokenPipelineConfig pipeline_from(Options const& o) {
    TokenPipelineConfig cfg = TokenPipelineConfig::english();
    cfg.stem = !o.no_stem;
    std::string path = o.stopwords;
    if (path.empty()) {
        if (char const* env = std::getenv(stopwords_env); env != nullptr && *env != '\0') {
            path = env;
        }
    }
    if (!path.empty()) {
        cfg.stopwords = load_stopwords(path);
    }
    return cfg;
}

json report_json(MetricsReport const& r) {
    json per_topic = json::array();
    for (auto const& t : r.per_topic) {
        per_topic.push_back({{"topic", t.topic}, {"map", t.ap}, {"ndcg20", t.ndcg20}, {"recall1000", t.recall1000}});
    }
    return json{{"num_q", r.topic_count()},
                {"map", r.map},
                {"ndcg20", r.ndcg20},
                {"recall1000", r.recall1000},
                {"per_topic", per_topic},
                {"skipped_no_relevant", r.skipped_no_relevant},
                {"skipped_not_judged", r.skipped_not_judged}};
}

json sig_json(SigTestResult const& s) {
    json j{{"n_pairs", s.n_pairs}, {"mean_diff", s.mean_diff}, {"p_value", s.p_value}, {"degenerate", s.degenerate}};
    j["t_statistic"] = std::isfinite(s.t_statistic) ? json(s.t_statistic) : json(s.t_statistic > 0 ? "inf" : "-inf");
    return j;
}

int cmd_index(Options const& o, std::ostream& out, std::ostream& err) {
    auto cfg = pipeline_from(o);
    auto corpus = read_jsonl(o.corpus);
    auto index = build_index(corpus, cfg);
    save_index(index, o.out);
    auto const& s = index.stats();
    std::size_t empty = 0;
    for (auto const& d : index.docs()) {
        empty += d.length_tokens == 0 ? 1 : 0;
    }
    if (empty > 0) {
        fmt::print(err, "warning: {} empty document(s) indexed but not retrievable\n", empty);
    }
    fmt::print(out, "documents {}\ntokens {}\nvocabulary {}\nsum_vector_lengths {}\npipeline {}\n", s.n,
               s.total_tokens, s.vocab_size, s.sum_vector_lengths, index.pipeline_hash());
    return exit_ok;
}

int cmd_search(Options const& o, std::ostream& out, std::ostream& err) {
    auto cfg = resolve_model(o);
    auto index = load_index(o.index);
    auto q = prepare_query(o.query, index);
    auto ranking = retrieve(q, index, cfg, o.k);
    if (ranking.empty_query) {
        fmt::print(err, "warning: no query term is in the index vocabulary\n");
    }
    for (std::size_t i = 0; i < ranking.docs.size(); ++i) {
        fmt::print(out, "{} {} {:.6f}\n", i + 1, ranking.docs[i].doc_id, ranking.docs[i].score);
    }
    return exit_ok;
}

void warn_empty_topics(std::vector<std::string> const& empty, std::ostream& err) {
    for (auto const& t : empty) {
        fmt::print(err, "warning: topic {} has no indexed term; no results\n", t);
    }
}

int cmd_run(Options const& o, std::ostream&, std::ostream& err) {
    auto cfg = resolve_model(o);
    auto index = load_index(o.index);
    auto topics = read_jsonl(o.topics);
    std::vector<std::string> empty;
    auto run = run_topics(index, cfg, topics, o.depth, o.tag, o.threads, &empty);
    warn_empty_topics(empty, err);
    auto file = open_output(o.out);
    write_run(file, run);
    return exit_ok;
}

int cmd_eval(Options const& o, std::ostream& out, std::ostream& err) {
    auto report = evaluate(read_run(o.run), read_qrels(o.qrels));
    for (auto const& t : report.skipped_not_judged) {
        fmt::print(err, "warning: topic {} is not in the qrels; skipped\n", t);
    }
    if (o.json_output) {
        fmt::print(out, "{}\n", report_json(report).dump(2));
        return exit_ok;
    }
    if (o.per_query) {
        for (auto const& t : report.per_topic) {
            fmt::print(out, "map\t{}\t{:.6f}\nndcg20\t{}\t{:.6f}\nrecall1000\t{}\t{:.6f}\n", t.topic, t.ap, t.topic,
                       t.ndcg20, t.topic, t.recall1000);
        }
    }
    fmt::print(out, "num_q\tall\t{}\nmap\tall\t{:.6f}\nndcg20\tall\t{:.6f}\nrecall1000\tall\t{:.6f}\n",
               report.topic_count(), report.map, report.ndcg20, report.recall1000);
    if (!report.skipped_no_relevant.empty()) {
        fmt::print(out, "skipped_no_relevant\tall\t{}\n", report.skipped_no_relevant.size());
    }
    if (!report.skipped_not_judged.empty()) {
        fmt::print(out, "skipped_not_judged\tall\t{}\n", report.skipped_not_judged.size());
    }
    return exit_ok;
}

int cmd_sweep(Options const& o, std::ostream& out, std::ostream& err) {
    auto model = parse_model(o.model);
    if (!model) {
        throw UsageError(fmt::format("unknown model '{}'", o.model));
    }
    auto grid = o.grid.empty() ? default_grid(*model) : parse_grid(o.grid);
    auto index = load_index(o.index);
    auto topics = read_jsonl(o.topics);
    auto qrels = read_qrels(o.qrels);
    auto result = sweep(index, *model, grid, topics, qrels, o.depth, o.threads);

    bool failed = false;
    for (auto const& row : result.rows) {
        if (!row.report) {
            failed = true;
            fmt::print(err, "error: grid point {}: {}\n", row.param, row.error);
        }
    }
    if (o.json_output) {
        json rows = json::array();
        for (auto const& row : result.rows) {
            rows.push_back(row.report ? json{{"param", row.param}, {"report", report_json(*row.report)}}
                                      : json{{"param", row.param}, {"error", row.error}});
        }
        fmt::print(out, "{}\n", json{{"model", model_name(*model)}, {"rows", rows}}.dump(2));
    } else {
        fmt::print(out, "param,map,ndcg20,recall1000\n");
        for (auto const& row : result.rows) {
            if (row.report) {
                fmt::print(out, "{:.6f},{:.6f},{:.6f},{:.6f}\n", row.param, row.report->map, row.report->ndcg20,
                           row.report->recall1000);
            } else {
                fmt::print(out, "{:.6f},,,\n", row.param);
            }
        }
    }
    if (!o.per_query_out.empty()) {
        auto file = open_output(o.per_query_out);
        fmt::print(file, "param,topic,map,ndcg20,recall1000\n");
        for (auto const& row : result.rows) {
            if (!row.report) {
                continue;
            }
            for (auto const& t : row.report->per_topic) {
                fmt::print(file, "{:.6f},{},{:.6f},{:.6f},{:.6f}\n", row.param, t.topic, t.ap, t.ndcg20, t.recall1000);
            }
        }
    }
    return failed ? exit_data : exit_ok;
}

int cmd_sigtest(Options const& o, std::ostream& out, std::ostream& err) {
    auto metric = parse_metric(o.metric);
    if (!metric) {
        throw UsageError(fmt::format("unknown metric '{}' (expected map, ndcg20 or recall1000)", o.metric));
    }
    auto qrels = read_qrels(o.qrels);
    auto a = evaluate(read_run(o.run_a), qrels);
    auto b = evaluate(read_run(o.run_b), qrels);
    auto sig = compare_reports(a, b, *metric);
    if (sig.degenerate) {
        fmt::print(err, "warning: per-topic differences are constant; t is infinite and p is reported as 0\n");
    }
    if (o.json_output) {
        auto j = sig_json(sig);
        j["metric"] = metric_name(*metric);
        j["mean_a"] = a.get(*metric);
        j["mean_b"] = b.get(*metric);
        fmt::print(out, "{}\n", j.dump(2));
        return exit_ok;
    }
    fmt::print(out, "metric {}\nn {}\nmean_a {:.6f}\nmean_b {:.6f}\nmean_diff {:.6f}\nt {:.6f}\np {:.6f}\n",
               metric_name(*metric), sig.n_pairs, a.get(*metric), b.get(*metric), sig.mean_diff, sig.t_statistic,
               sig.p_value);
    return exit_ok;
}

int cmd_estimate_mc(Options const& o, std::ostream& out, std::ostream& err) {
    auto index = load_index(o.index);
    auto est = estimate_mc(index, McOptions{o.init, o.tol, o.max_iter});
    bool all_distinct = std::all_of(index.docs().begin(), index.docs().end(),
                                    [](DocStats const& d) { return d.length_types == d.length_tokens; });
    if (all_distinct && !est.uninformative) {
        fmt::print(err, "warning: no document repeats a term; the likelihood keeps rising with m_c\n");
    }
    if (est.uninformative) {
        fmt::print(err, "warning: every document has length one; the collection carries no burstiness evidence\n");
    }
    fmt::print(out, "m_c {:.6f}\niterations {}\nconverged {}\nresidual {:.3e}\n\nomega,mu_prime\n", est.m_c,
               est.iterations, est.converged ? "yes" : "no", est.residual);
    for (double omega : {0.5, 0.7, 0.8, 0.9}) {
        fmt::print(out, "{:.1f},{:.6f}\n", omega, derive_mu_prime(omega, est.m_c));
    }
    if (!est.converged) {
        fmt::print(err, "error: no convergence within {} iterations\n", o.max_iter);
        return exit_divergence;
    }
    return exit_ok;
}

int cmd_expand(Options const& o, std::ostream&, std::ostream& err) {
    auto cfg = resolve_model(o);
    if (cfg.model() != Model::spud_dir && cfg.model() != Model::mql_dir) {
        throw UsageError("expand supports the spud_dir and mql_dir models");
    }
    auto variant = parse_variant(o.variant);
    if (!variant) {
        throw UsageError(fmt::format("unknown feedback variant '{}'", o.variant));
    }
    auto index = load_index(o.index);
    ForwardIndex forward(index);
    auto topics = read_jsonl(o.topics);
    FeedbackConfig fb{o.fb_docs, o.fb_terms, o.tau, o.expansion_mu, *variant, cfg.value()};

    RunFile run;
    run.tag = o.tag;
    for (auto const& topic : topics) {
        if (run.topics.contains(topic.id)) {
            throw DataError(fmt::format("duplicate topic id '{}'", topic.id));
        }
        auto q = prepare_query(topic.text, index);
        auto first = retrieve(q, index, cfg, std::max(o.depth, fb.k_docs));
        if (first.empty_query) {
            fmt::print(err, "warning: topic {} has no indexed term; no results\n", topic.id);
            continue;
        }
        auto expansion = expansion_model(q, index, forward, first.docs, fb);
        if (expansion.fewer_docs_than_requested) {
            fmt::print(err, "warning: topic {}: only {} feedback document(s) available\n", topic.id,
                       expansion.doc_weights.size());
        }
        auto final_model = smooth_query(q, expansion.model, fb.tau);
        run = to_run(topic.id, rerank_with_model(final_model, index, cfg, o.depth), std::move(run));
    }
    auto file = open_output(o.out);
    write_run(file, run);
    return exit_ok;
}

int cmd_lnc2(Options const& o, std::ostream& out, std::ostream&) {
    if (!o.seed) {
        throw UsageError("diagnose lnc2 requires --seed");
    }
    auto cfg = resolve_model(o);
    auto index = load_index(o.index);
    ForwardIndex forward(index);
    auto trials = random_lnc2_trials(index, forward, o.trials, *o.seed);
    auto report = check_lnc2(index.stats(), cfg, trials);
    fmt::print(out, "model {}\ntrials {}\nmax_abs_delta {:.6e}\nverdict {}\n", model_name(cfg.model()),
               trials.size(), report.max_abs_delta, report.satisfied ? "satisfied" : "violated");
    if (report.witness) {
        auto const& w = report.outcomes[*report.witness];
        fmt::print(out, "witness {} original {:.6f} concatenated {:.6f}\n", trials[*report.witness].label,
                   w.score_original, w.score_concat);
    }
    return exit_ok;
}

int cmd_length_bins(Options const& o, std::ostream&, std::ostream&) {
    LengthKind kind;
    if (o.length_kind == "tokens") {
        kind = LengthKind::tokens;
    } else if (o.length_kind == "types") {
        kind = LengthKind::types;
    } else {
        throw UsageError(fmt::format("unknown length kind '{}'", o.length_kind));
    }
    auto index = load_index(o.index);
    auto curve = length_bin_analysis(read_run(o.run), read_qrels(o.qrels), index, o.bins, kind);
    auto file = open_output(o.out);
    write_length_bins_csv(file, curve);
    return exit_ok;
}

int cmd_bg_ratio(Options const& o, std::ostream& out, std::ostream&) {
    auto index = load_index(o.index);
    auto table = background_ratio_table(index, {}, o.top);
    fmt::print(out, "rank,top_term,top_ratio,bottom_term,bottom_ratio\n");
    for (std::size_t i = 0; i < table.top.size(); ++i) {
        fmt::print(out, "{},{},{:.6f},{},{:.6f}\n", i + 1, table.top[i].term, table.top[i].ratio, table.bottom[i].term,
                   table.bottom[i].ratio);
    }
    return exit_ok;
}

int cmd_idf_curve(Options const& o, std::ostream&, std::ostream&) {
    std::uint64_t n = 0;
    if (o.n_docs) {
        n = *o.n_docs;
    } else if (!o.index.empty()) {
        n = load_index(o.index).stats().n;
    } else {
        throw UsageError("diagnose idf-curve needs --n or --index");
    }
    auto curve = idf_family_curve(n, o.delta, default_df_range(n));
    auto file = open_output(o.out);
    write_idf_curve_csv(file, curve);
    return exit_ok;
}

}  // namespace

int dispatch(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Polya urn query-likelihood retrieval workbench"};
    app.name("spud");
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "Upper bound on worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    auto* index = app.add_subcommand("index", "Build an index from a JSON-lines corpus");
    index->add_option("--corpus", o.corpus, "JSON-lines file of {id, text}")->required();
    index->add_option("--out", o.out, "Index directory")->required();
    index->add_option("--stopwords", o.stopwords, "Stopword file (default: $SPUD_STOPWORDS, then bundled list)");
    index->add_flag("--no-stem", o.no_stem, "Disable Porter stemming");

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--index", o.index, "Index directory")->required();
        sub->add_option("--model", o.model, "mql_jm, mql_dir, lm2, lm3, spud_jm, spud_dir (lm1, lm4 aliases)")->required();
        sub->add_option("--param", o.param, "Model parameter (pi, mu, U or mu'); not accepted by spud_jm");
    };

    auto* search = app.add_subcommand("search", "Rank documents for one query");
    add_model(search);
    search->add_option("--query", o.query, "Query text")->required();
    search->add_option("-k", o.k, "Number of results")->capture_default_str()->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "Batch retrieval into a TREC run file");
    add_model(run);
    run->add_option("--topics", o.topics, "JSON-lines topics {id, text}")->required();
    run->add_option("--out", o.out, "Run file")->required();
    run->add_option("--tag", o.tag, "Run tag")->capture_default_str();
    run->add_option("--depth", o.depth, "Results per topic")->capture_default_str()->check(CLI::PositiveNumber);

    auto* eval = app.add_subcommand("eval", "MAP, NDCG@20 and Recall@1000 of a run");
    eval->add_option("--run", o.run, "Run file")->required();
    eval->add_option("--qrels", o.qrels, "Qrels file")->required();
    eval->add_flag("--per-query", o.per_query, "Also print per-topic values");
    eval->add_flag("--json", o.json_output, "Full-precision JSON report");

    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a model over a parameter grid");
    sweep_cmd->add_option("--index", o.index, "Index directory")->required();
    sweep_cmd->add_option("--model", o.model, "Model name")->required();
    sweep_cmd->add_option("--grid", o.grid, "start:stop:step or a comma list (default depends on the model)");
    sweep_cmd->add_option("--topics", o.topics, "JSON-lines topics")->required();
    sweep_cmd->add_option("--qrels", o.qrels, "Qrels file")->required();
    sweep_cmd->add_option("--depth", o.depth, "Results per topic")->capture_default_str()->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--per-query-out", o.per_query_out, "CSV of per-topic metrics for every grid point");
    sweep_cmd->add_flag("--json", o.json_output, "Full-precision JSON output");

    auto* sigtest = app.add_subcommand("sigtest", "Paired two-sided t-test between two runs");
    sigtest->add_option("--run-a", o.run_a, "First run")->required();
    sigtest->add_option("--run-b", o.run_b, "Second run")->required();
    sigtest->add_option("--qrels", o.qrels, "Qrels file")->required();
    sigtest->add_option("--metric", o.metric, "map, ndcg20 or recall1000")->capture_default_str();
    sigtest->add_flag("--json", o.json_output, "Full-precision JSON output");

    auto* estimate = app.add_subcommand("estimate-mc", "Estimate the background concentration m_c");
    estimate->add_option("--index", o.index, "Index directory")->required();
    estimate->add_option("--init", o.init, "Starting value")->capture_default_str();
    estimate->add_option("--tol", o.tol, "Relative-change tolerance")->capture_default_str();
    estimate->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();

    auto* expand = app.add_subcommand("expand", "Pseudo-relevance feedback (RM3 or PURM) into a run file");
    add_model(expand);
    expand->add_option("--topics", o.topics, "JSON-lines topics")->required();
    expand->add_option("--variant", o.variant, "rm3 or purm")->capture_default_str();
    expand->add_option("--k", o.fb_docs, "Feedback documents")->capture_default_str()->check(CLI::PositiveNumber);
    expand->add_option("--terms", o.fb_terms, "Expansion terms")->capture_default_str()->check(CLI::PositiveNumber);
    expand->add_option("--tau", o.tau, "Weight of the original query")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    expand->add_option("--expansion-mu", o.expansion_mu, "Smoothing of feedback document models")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    expand->add_option("--out", o.out, "Run file")->required();
    expand->add_option("--tag", o.tag, "Run tag")->capture_default_str();
    expand->add_option("--depth", o.depth, "Results per topic")->capture_default_str()->check(CLI::PositiveNumber);

    auto* diagnose = app.add_subcommand("diagnose", "Length-normalisation and background-model diagnostics");
    diagnose->require_subcommand(1);
    auto* lnc2 = diagnose->add_subcommand("lnc2", "Self-concatenation invariance check");
    add_model(lnc2);
    lnc2->add_option("--trials", o.trials, "Number of random trials")->capture_default_str();
    lnc2->add_option("--seed", o.seed, "Random seed")->required();
    auto* bins = diagnose->add_subcommand("length-bins", "P(retrieved) and P(relevant) by length bin");
    bins->add_option("--index", o.index, "Index directory")->required();
    bins->add_option("--run", o.run, "Run file")->required();
    bins->add_option("--qrels", o.qrels, "Qrels file")->required();
    bins->add_option("--bins", o.bins, "Number of bins")->capture_default_str();
    bins->add_option("--length", o.length_kind, "tokens or types")->capture_default_str();
    bins->add_option("--out", o.out, "CSV output")->required();
    auto* ratio = diagnose->add_subcommand("bg-ratio", "Document-frequency vs multinomial background ratios");
    ratio->add_option("--index", o.index, "Index directory")->required();
    ratio->add_option("--top", o.top, "Rows at each end")->capture_default_str();
    auto* idf = diagnose->add_subcommand("idf-curve", "Burstiness-aware idf family against classic idf");
    idf->add_option("--delta", o.delta, "Composite factor delta")->capture_default_str();
    idf->add_option("--n", o.n_docs, "Collection size");
    idf->add_option("--index", o.index, "Take the collection size from an index");
    idf->add_option("--out", o.out, "CSV output")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return exit_ok;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (CLI::ParseError const& e) {
        // Requirement checks run before CLI11 complains about extras; an
        // unknown flag is the more useful message.
        auto extras = app.remaining(true);
        if (!extras.empty()) {
            std::string joined;
            for (auto const& x : extras) {
                joined += (joined.empty() ? "" : " ") + x;
            }
            fmt::print(err, "error: unrecognised argument(s): {}\n", joined);
        } else {
            fmt::print(err, "error: {}\n", e.what());
        }
        fmt::print(err, "run with --help for usage\n");
        return exit_usage;
    }

    struct Command {
        CLI::App* app;
        std::string name;
        int (*fn)(Options const&, std::ostream&, std::ostream&);
    };
    std::vector<Command> const commands{
        {index, "index", cmd_index},       {search, "search", cmd_search},
        {run, "run", cmd_run},             {eval, "eval", cmd_eval},
        {sweep_cmd, "sweep", cmd_sweep},   {sigtest, "sigtest", cmd_sigtest},
        {estimate, "estimate-mc", cmd_estimate_mc}, {expand, "expand", cmd_expand},
        {lnc2, "diagnose lnc2", cmd_lnc2}, {bins, "diagnose length-bins", cmd_length_bins},
        {ratio, "diagnose bg-ratio", cmd_bg_ratio}, {idf, "diagnose idf-curve", cmd_idf_curve},
    };
    for (auto const& c : commands) {
        if (!c.app->parsed()) {
            continue;
        }
        print_config(*c.app, c.name, err);
        fmt::print(err, "config: threads {}\n", o.threads);
        try {
            return c.fn(o, out, err);
        } catch (DivergenceError const& e) {
            fmt::print(err, "error: {}\n", e.what());
            return exit_divergence;
        } catch (UsageError const& e) {
            fmt::print(err, "error: {}\n", e.what());
            return exit_usage;
        } catch (DataError const& e) {
            fmt::print(err, "error: {}\n", e.what());
            return exit_data;
        } catch (std::exception const& e) {
            fmt::print(err, "error: {}\n", e.what());
            return exit_data;
        }
    }
    fmt::print(err, "error: no command given\n{}", app.help());
    return exit_usage;
}

}  // namespace spud::cli
