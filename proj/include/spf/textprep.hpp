#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spf {

struct RawDoc {
    std::string id;
    std::string text;
    std::optional<std::string> label;
};

struct RawCorpus {
    std::vector<RawDoc> docs;
};

// A document after tokenization and filtering.
struct TokenizedDoc {
    std::string id;
    std::vector<std::string> tokens;
    std::optional<std::string> label;
};

struct TokenizedCorpus {
    std::vector<TokenizedDoc> docs;
};

struct Vocabulary {
    std::vector<std::string> terms;             // column id -> term
    std::unordered_map<std::string, int> index; // term -> column id

    int size() const { return static_cast<int>(terms.size()); }
};

// Sparse document-term count matrix. Row entries are (term id, count)
// pairs with count >= 1, sorted by term id.
struct DocTermMatrix {
    int D = 0;
    int V = 0;
    std::vector<std::vector<std::pair<int, int>>> rows;
    std::vector<std::string> doc_ids;
    std::vector<std::string> labels; // empty when unlabeled
    std::vector<long long> totals;   // N_d = sum_v y_dv

    bool has_labels() const { return !labels.empty(); }
};

struct PreprocessOptions {
    bool lowercase = true;
    std::vector<std::string> stop_words; // empty -> built-in English list
    int min_term_frequency = 2;          // global count threshold
    int min_doc_length = 7;              // retained tokens per document
};

// Per-topic seed word sets over vocabulary term ids.
struct SeedLexicon {
    std::vector<std::string> topic_names;
    std::vector<std::vector<int>> seeds; // sorted term ids, may be empty

    int K() const { return static_cast<int>(topic_names.size()); }
};

// Built-in English stop-word list.
const std::vector<std::string>& default_stop_words();

// Tokenize, lowercase, drop stop words, then apply the global
// min-frequency filter followed by the min-document-length filter.
// Throws std::runtime_error if no documents survive.
TokenizedCorpus preprocess(const RawCorpus& raw, const PreprocessOptions& opts);

std::pair<Vocabulary, DocTermMatrix> build_dtm(const TokenizedCorpus& corpus);

// Automatic seed selection: one pseudo-document per label, tf = total
// term count within the label, idf = ln((1 + C) / (1 + df)) + 1 over the
// label-level pseudo-corpus. Ties break by global frequency then term.
SeedLexicon tfidf_seed_suggestion(const DocTermMatrix& dtm,
                                  const Vocabulary& vocab, int top_n);

} // namespace spf
