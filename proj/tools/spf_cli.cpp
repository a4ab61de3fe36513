// Command-line front end: prepare, seeds, train, topics, classify,
// evaluate, synth. Commands compose through files only; all randomness
// flows from a single --seed flag.

#include "CLI11.hpp"

#include "spf/eval.hpp"
#include "spf/inference.hpp"
#include "spf/io.hpp"
#include "spf/model.hpp"
#include "spf/posterior.hpp"
#include "spf/rng.hpp"
#include "spf/textprep.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace {

using namespace spf;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void add_prior_options(CLI::App* cmd, PriorConfig& p) {
    cmd->add_option("--prior-a", p.a, "Neutral topic-term shape")->capture_default_str();
    cmd->add_option("--prior-b", p.b, "Neutral topic-term rate")->capture_default_str();
    cmd->add_option("--prior-c", p.c, "Seed boost shape")->capture_default_str();
    cmd->add_option("--prior-d", p.d, "Seed boost rate")->capture_default_str();
    cmd->add_option("--prior-e", p.e, "Document-topic shape")->capture_default_str();
    cmd->add_option("--prior-f", p.f, "Document-topic rate")->capture_default_str();
}

void add_train_options(CLI::App* cmd, TrainConfig& cfg) {
    cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch-size", cfg.batch_size, "Documents per minibatch")
        ->capture_default_str();
    cmd->add_option("--learning-rate", cfg.learning_rate, "Adam step size")
        ->capture_default_str();
    cmd->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples per step")
        ->capture_default_str();
    cmd->add_flag("--loo-baseline", cfg.loo_baseline,
                  "Leave-one-out variance baseline (needs --mc-samples >= 2)");
    cmd->add_option("--seed", cfg.rng_seed, "Root random seed")->capture_default_str();
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
    std::string corpus, out_prefix, stop_words;
    PreprocessOptions opts;
};

int cmd_prepare(const PrepareArgs& a) {
    RawCorpus raw = read_corpus(a.corpus);
    PreprocessOptions opts = a.opts;
    if (!a.stop_words.empty()) opts.stop_words = read_lines(a.stop_words);
    TokenizedCorpus tokenized = preprocess(raw, opts);
    auto [vocab, dtm] = build_dtm(tokenized);

    save_vocabulary(vocab, a.out_prefix + ".vocab");
    save_dtm(dtm, a.out_prefix + ".dtm");
    save_doc_table(dtm, a.out_prefix + ".docs");

    std::size_t nnz = 0;
    for (const auto& row : dtm.rows) nnz += row.size();
    std::printf("documents: %zu read, %d kept, %zu dropped\n", raw.docs.size(),
                dtm.D, raw.docs.size() - dtm.D);
    std::printf("vocabulary: %d terms, %zu nonzero counts\n", vocab.size(), nnz);
    return 0;
}

struct SeedsArgs {
    std::string dtm, docs, vocab, out;
    int top_n = 10;
};

int cmd_seeds(const SeedsArgs& a) {
    const Vocabulary vocab = load_vocabulary(a.vocab);
    const DocTermMatrix dtm = load_dtm(a.dtm, a.docs);
    if (!dtm.has_labels())
        throw std::runtime_error("seeds: doc table has no labels");
    const SeedLexicon lex = tfidf_seed_suggestion(dtm, vocab, a.top_n);
    save_lexicon(lex, vocab, a.out);
    std::printf("wrote %d topics x %d seed words to %s\n", lex.K(), a.top_n,
                a.out.c_str());
    return 0;
}

struct TrainArgs {
    std::string dtm, vocab, seeds, out, trace;
    PriorConfig priors;
    TrainConfig cfg;
};

int cmd_train(const TrainArgs& a) {
    const Vocabulary vocab = load_vocabulary(a.vocab);
    const DocTermMatrix dtm = load_dtm(a.dtm);

    ModelSpec spec;
    spec.D = dtm.D;
    spec.V = vocab.size();
    spec.K = 0;
    spec.priors = a.priors;
    spec.lexicon = load_lexicon(a.seeds, vocab);
    spec.K = spec.lexicon.K();

    const FitResult fit = train(dtm, spec, a.cfg);

    SavedModel model;
    model.spec = spec;
    model.vocabulary = vocab;
    model.params = fit.params;
    model.meta.epochs = a.cfg.epochs;
    model.meta.final_elbo =
        fit.trace.epoch_elbo.empty() ? 0.0 : fit.trace.epoch_elbo.back();
    model.meta.rng_seed = a.cfg.rng_seed;
    save_model(model, a.out);
    if (!a.trace.empty()) save_trace(fit.trace, a.trace);

    if (!fit.trace.epoch_elbo.empty())
        std::printf("epochs: %d, first ELBO estimate %.6g, final %.6g\n",
                    a.cfg.epochs, fit.trace.epoch_elbo.front(),
                    fit.trace.epoch_elbo.back());
    std::printf("model written to %s\n", a.out.c_str());
    return 0;
}

// DTM stand-in for commands that never touch document counts.
DocTermMatrix placeholder_dtm(const ModelSpec& spec) {
    DocTermMatrix dtm;
    dtm.D = spec.D;
    dtm.V = spec.V;
    dtm.rows.resize(spec.D);
    dtm.totals.assign(spec.D, 0);
    for (int d = 0; d < spec.D; ++d) dtm.doc_ids.push_back("doc" + std::to_string(d));
    return dtm;
}

struct TopicsArgs {
    std::string model, drop;
    int top_n = 10;
};

int cmd_topics(const TopicsArgs& a) {
    const SavedModel m = load_model(a.model);
    const FittedModel fitted =
        posterior_means(m.params, m.spec, placeholder_dtm(m.spec), m.vocabulary);
    std::vector<std::string> drop;
    if (!a.drop.empty()) drop = read_lines(a.drop);

    for (int k = 0; k < m.spec.K; ++k) {
        std::printf("%s\n", m.spec.lexicon.topic_names[k].c_str());
        for (const RankedTerm& t : top_terms(fitted, k, a.top_n, drop))
            std::printf("  %-24s %12.6g%s\n", t.term.c_str(), t.intensity,
                        t.is_seed ? "  [seed]" : "");
    }
    return 0;
}

struct ClassifyArgs {
    std::string model, dtm, docs, out;
    bool fold_in = false;
    TrainConfig cfg;
};

int cmd_classify(const ClassifyArgs& a) {
    const SavedModel m = load_model(a.model);
    std::vector<Assignment> assignments;

    if (a.fold_in) {
        if (a.dtm.empty())
            throw std::runtime_error("classify: --fold-in requires --dtm");
        const DocTermMatrix fresh = load_dtm(a.dtm, a.docs);
        FittedModel fitted;
        fitted.theta_hat = score_new_documents(m.params, m.spec, fresh, a.cfg);
        assignments = classify(fitted, fresh.doc_ids);
    } else {
        DocTermMatrix dtm =
            a.dtm.empty() ? placeholder_dtm(m.spec) : load_dtm(a.dtm, a.docs);
        if (a.dtm.empty() && !a.docs.empty()) {
            dtm.doc_ids.clear();
            for (const std::string& line : read_lines(a.docs))
                dtm.doc_ids.push_back(line.substr(0, line.find('\t')));
            if (static_cast<int>(dtm.doc_ids.size()) != m.spec.D)
                throw std::runtime_error(
                    "classify: doc table rows do not match the trained model");
        }
        if (dtm.D != m.spec.D)
            throw std::runtime_error(
                "classify: DTM rows do not match the trained model (use --fold-in "
                "for new documents)");
        const FittedModel fitted = posterior_means(m.params, m.spec, dtm, m.vocabulary);
        assignments = classify(fitted, dtm.doc_ids);
    }

    save_assignments(assignments, m.spec.lexicon.topic_names, a.out);
    std::printf("wrote %zu assignments to %s\n", assignments.size(), a.out.c_str());
    return 0;
}

struct EvaluateArgs {
    std::string assignments, gold, map, out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const std::vector<LoadedAssignment> loaded = load_assignments(a.assignments);

    std::unordered_map<std::string, std::string> gold;
    for (const std::string& line : read_lines(a.gold)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("evaluate: gold line has no label: " + line);
        gold[line.substr(0, tab)] = line.substr(tab + 1);
    }

    // Topic name -> gold label; identity unless remapped.
    std::unordered_map<std::string, std::string> remap;
    if (!a.map.empty())
        for (const std::string& line : read_lines(a.map)) {
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw std::runtime_error("evaluate: map line has no label: " + line);
            remap[line.substr(0, tab)] = line.substr(tab + 1);
        }

    // Topic indices by first appearance in the assignments file.
    std::unordered_map<std::string, int> topic_index;
    LabelMap label_map;
    std::vector<Assignment> assignments;
    std::vector<std::string> gold_labels;
    for (const LoadedAssignment& la : loaded) {
        auto [it, inserted] =
            topic_index.emplace(la.topic_name, static_cast<int>(topic_index.size()));
        if (inserted) {
            const auto m = remap.find(la.topic_name);
            label_map.topic_to_label.push_back(m == remap.end() ? la.topic_name
                                                                : m->second);
        }
        const auto g = gold.find(la.doc_id);
        if (g == gold.end())
            throw std::runtime_error("evaluate: no gold label for doc " + la.doc_id);
        assignments.push_back({la.doc_id, it->second, la.certainty});
        gold_labels.push_back(g->second);
    }

    const ClassificationReport report = evaluate(assignments, gold_labels, label_map);
    std::fputs(render_report(report).c_str(), stdout);
    if (!a.out.empty()) {
        std::ofstream out(a.out);
        if (!out) throw std::runtime_error("cannot open for writing: " + a.out);
        out << report_csv(report);
    }
    return 0;
}

struct SynthArgs {
    int D = 1000, V = 200, K = 3, seeds_per_topic = 0;
    std::uint64_t seed = 0;
    PriorConfig priors;
    std::string out_prefix;
};

int cmd_synth(const SynthArgs& a) {
    if (a.seeds_per_topic * a.K > a.V)
        throw std::runtime_error("synth: seeds-per-topic * K exceeds vocabulary size");
    ModelSpec spec;
    spec.D = a.D;
    spec.V = a.V;
    spec.K = a.K;
    spec.priors = a.priors;
    Vocabulary vocab;
    for (int v = 0; v < a.V; ++v) {
        vocab.index.emplace("w" + std::to_string(v), v);
        vocab.terms.push_back("w" + std::to_string(v));
    }
    for (int k = 0; k < a.K; ++k) {
        spec.lexicon.topic_names.push_back("topic" + std::to_string(k));
        std::vector<int> seeds;
        for (int j = 0; j < a.seeds_per_topic; ++j)
            seeds.push_back(k * a.seeds_per_topic + j);
        spec.lexicon.seeds.push_back(std::move(seeds));
    }

    RandomState rng(a.seed);
    SyntheticData data = generate_synthetic(spec, rng);

    // Gold label: the dominant true topic intensity.
    data.dtm.labels.resize(a.D);
    for (int d = 0; d < a.D; ++d) {
        int best = 0;
        for (int k = 1; k < a.K; ++k)
            if (data.theta(d, k) > data.theta(d, best)) best = k;
        data.dtm.labels[d] = spec.lexicon.topic_names[best];
    }

    save_dtm(data.dtm, a.out_prefix + ".dtm");
    save_doc_table(data.dtm, a.out_prefix + ".docs");
    save_vocabulary(vocab, a.out_prefix + ".vocab");
    save_lexicon(spec.lexicon, vocab, a.out_prefix + ".lexicon");

    const auto write_mat = [](const Mat& m, const std::string& path) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        char buf[32];
        for (int i = 0; i < m.rows; ++i) {
            for (int j = 0; j < m.cols; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
                out << (j ? "," : "") << buf;
            }
            out << '\n';
        }
    };
    write_mat(data.theta, a.out_prefix + ".theta.csv");
    write_mat(data.beta, a.out_prefix + ".beta.csv");

    std::printf("synthetic corpus: D=%d V=%d K=%d written to %s.*\n", a.D, a.V,
                a.K, a.out_prefix.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded Poisson Factorization topic modeling"};
    app.require_subcommand(1);
    // Flat key-value config; command keys are section-qualified, e.g.
    // "train.epochs=100". Flags win over the file, the file over defaults.
    app.set_config("--config", "", "Key-value config file (keys like train.epochs=100)");

    PrepareArgs prepare;
    CLI::App* p = app.add_subcommand("prepare", "Tokenize a corpus into a DTM");
    p->add_option("--corpus", prepare.corpus, "CSV/TSV with doc_id,text[,label]")
        ->required()
        ->check(CLI::ExistingFile);
    p->add_option("--out", prepare.out_prefix, "Output path prefix")->required();
    p->add_option("--min-term-frequency", prepare.opts.min_term_frequency,
                  "Global term count threshold")
        ->capture_default_str();
    p->add_option("--min-doc-length", prepare.opts.min_doc_length,
                  "Minimum retained tokens per document")
        ->capture_default_str();
    bool keep_case = false;
    p->add_flag("--keep-case", keep_case, "Skip lowercasing");
    p->add_option("--stop-words", prepare.stop_words,
                  "Stop-word file, one per line (default: built-in English)")
        ->check(CLI::ExistingFile);

    SeedsArgs seeds;
    CLI::App* s = app.add_subcommand("seeds", "Suggest seed words by label tf-idf");
    s->add_option("--dtm", seeds.dtm)->required()->check(CLI::ExistingFile);
    s->add_option("--docs", seeds.docs, "Doc table with labels")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--vocab", seeds.vocab)->required()->check(CLI::ExistingFile);
    s->add_option("--top-n", seeds.top_n, "Seed words per topic")->capture_default_str();
    s->add_option("--out", seeds.out, "Lexicon output path")->required();

    TrainArgs train_args;
    CLI::App* t = app.add_subcommand("train", "Fit the model by variational inference");
    t->add_option("--dtm", train_args.dtm)->required()->check(CLI::ExistingFile);
    t->add_option("--vocab", train_args.vocab)->required()->check(CLI::ExistingFile);
    t->add_option("--seeds", train_args.seeds, "Seed lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    t->add_option("--out", train_args.out, "Model output path")->required();
    t->add_option("--trace", train_args.trace, "Per-step ELBO trace CSV");
    add_prior_options(t, train_args.priors);
    add_train_options(t, train_args.cfg);

    TopicsArgs topics;
    CLI::App* tp = app.add_subcommand("topics", "Report high-intensity terms per topic");
    tp->add_option("--model", topics.model)->required()->check(CLI::ExistingFile);
    tp->add_option("-n,--top-n", topics.top_n, "Terms per topic")->capture_default_str();
    tp->add_option("--drop", topics.drop, "Terms to exclude, one per line")
        ->check(CLI::ExistingFile);

    ClassifyArgs classify_args;
    CLI::App* c = app.add_subcommand("classify", "Assign documents to topics");
    c->add_option("--model", classify_args.model)->required()->check(CLI::ExistingFile);
    c->add_option("--dtm", classify_args.dtm, "Training DTM, or new documents with --fold-in")
        ->check(CLI::ExistingFile);
    c->add_option("--docs", classify_args.docs, "Doc table for document ids")
        ->check(CLI::ExistingFile);
    c->add_flag("--fold-in", classify_args.fold_in,
                "Infer intensities for new documents with topics frozen");
    c->add_option("--out", classify_args.out, "Assignments CSV")->required();
    add_train_options(c, classify_args.cfg);

    EvaluateArgs eval_args;
    CLI::App* e = app.add_subcommand("evaluate", "Score assignments against gold labels");
    e->add_option("--assignments", eval_args.assignments)
        ->required()
        ->check(CLI::ExistingFile);
    e->add_option("--gold", eval_args.gold, "Doc table TSV with gold labels")
        ->required()
        ->check(CLI::ExistingFile);
    e->add_option("--map", eval_args.map, "Topic-to-label map TSV (default: identity)")
        ->check(CLI::ExistingFile);
    e->add_option("--out", eval_args.out, "Report CSV");

    SynthArgs synth;
    CLI::App* sy = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    sy->add_option("-D,--docs", synth.D, "Documents")->capture_default_str();
    sy->add_option("-V,--vocab-size", synth.V, "Vocabulary size")->capture_default_str();
    sy->add_option("-K,--topics", synth.K, "Topics")->capture_default_str();
    sy->add_option("--seeds-per-topic", synth.seeds_per_topic, "Planted seed words per topic")
        ->capture_default_str();
    sy->add_option("--seed", synth.seed, "Root random seed")->capture_default_str();
    add_prior_options(sy, synth.priors);
    sy->add_option("--out", synth.out_prefix, "Output path prefix")->required();

    CLI11_PARSE(app, argc, argv);
    prepare.opts.lowercase = !keep_case;

    try {
        if (p->parsed()) return cmd_prepare(prepare);
        if (s->parsed()) return cmd_seeds(seeds);
        if (t->parsed()) return cmd_train(train_args);
        if (tp->parsed()) return cmd_topics(topics);
        if (c->parsed()) return cmd_classify(classify_args);
        if (e->parsed()) return cmd_evaluate(eval_args);
        if (sy->parsed()) return cmd_synth(synth);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
