#include "spf/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace spf {

const std::vector<std::string>& default_stop_words() {
    static const std::vector<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am",
        "an", "and", "any", "are", "aren", "as", "at", "be", "because",
        "been", "before", "being", "below", "between", "both", "but", "by",
        "can", "cannot", "could", "couldn", "did", "didn", "do", "does",
        "doesn", "doing", "don", "down", "during", "each", "few", "for",
        "from", "further", "had", "hadn", "has", "hasn", "have", "haven",
        "having", "he", "her", "here", "hers", "herself", "him", "himself",
        "his", "how", "i", "if", "in", "into", "is", "isn", "it", "its",
        "itself", "just", "ll", "me", "more", "most", "mustn", "my",
        "myself", "no", "nor", "not", "now", "of", "off", "on", "once",
        "only", "or", "other", "ought", "our", "ours", "ourselves", "out",
        "over", "own", "re", "s", "same", "shan", "she", "should",
        "shouldn", "so", "some", "such", "t", "than", "that", "the",
        "their", "theirs", "them", "themselves", "then", "there", "these",
        "they", "this", "those", "through", "to", "too", "under", "until",
        "up", "ve", "very", "was", "wasn", "we", "were", "weren", "what",
        "when", "where", "which", "while", "who", "whom", "why", "will",
        "with", "won", "would", "wouldn", "you", "your", "yours",
        "yourself", "yourselves",
    };
    return words;
}

namespace {

bool is_alpha_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_alnum_byte(unsigned char c) {
    return is_alpha_byte(c) || (c >= '0' && c <= '9');
}

// Split on non-alphanumeric boundaries, keep pure-alphabetic tokens of
// length >= 2, optionally lowercased.
std::vector<std::string> tokenize(const std::string& text, bool lowercase) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && !is_alnum_byte(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        bool pure_alpha = true;
        while (j < n && is_alnum_byte(static_cast<unsigned char>(text[j]))) {
            if (!is_alpha_byte(static_cast<unsigned char>(text[j]))) pure_alpha = false;
            ++j;
        }
        if (pure_alpha && j - i >= 2) {
            std::string tok = text.substr(i, j - i);
            if (lowercase) {
                for (char& c : tok)
                    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
            out.push_back(std::move(tok));
        }
        i = j;
    }
    return out;
}

} // namespace

TokenizedCorpus preprocess(const RawCorpus& raw, const PreprocessOptions& opts) {
    const std::vector<std::string>& stop_src =
        opts.stop_words.empty() ? default_stop_words() : opts.stop_words;
    std::unordered_set<std::string> stop(stop_src.begin(), stop_src.end());

    TokenizedCorpus corpus;
    corpus.docs.reserve(raw.docs.size());
    std::unordered_map<std::string, long long> freq;
    for (const RawDoc& doc : raw.docs) {
        TokenizedDoc td;
        td.id = doc.id;
        td.label = doc.label;
        for (std::string& tok : tokenize(doc.text, opts.lowercase)) {
            if (stop.count(tok)) continue;
            ++freq[tok];
            td.tokens.push_back(std::move(tok));
        }
        corpus.docs.push_back(std::move(td));
    }

    // Global min-frequency filter first, then the min-document-length filter.
    TokenizedCorpus filtered;
    for (TokenizedDoc& td : corpus.docs) {
        std::vector<std::string> kept;
        for (std::string& tok : td.tokens) {
            if (freq[tok] >= opts.min_term_frequency) kept.push_back(std::move(tok));
        }
        if (static_cast<int>(kept.size()) >= opts.min_doc_length) {
            td.tokens = std::move(kept);
            filtered.docs.push_back(std::move(td));
        }
    }
    if (filtered.docs.empty())
        throw std::runtime_error("preprocess: empty corpus after filtering");
    return filtered;
}

std::pair<Vocabulary, DocTermMatrix> build_dtm(const TokenizedCorpus& corpus) {
    Vocabulary vocab;
    DocTermMatrix dtm;
    bool any_label = false;
    for (const TokenizedDoc& td : corpus.docs) any_label |= td.label.has_value();

    for (const TokenizedDoc& td : corpus.docs) {
        std::map<int, int> counts;
        for (const std::string& tok : td.tokens) {
            auto it = vocab.index.find(tok);
            int id;
            if (it == vocab.index.end()) {
                id = vocab.size();
                vocab.index.emplace(tok, id);
                vocab.terms.push_back(tok);
            } else {
                id = it->second;
            }
            ++counts[id];
        }
        std::vector<std::pair<int, int>> row(counts.begin(), counts.end());
        long long total = 0;
        for (auto& [v, c] : row) total += c;
        dtm.rows.push_back(std::move(row));
        dtm.totals.push_back(total);
        dtm.doc_ids.push_back(td.id);
        if (any_label) dtm.labels.push_back(td.label.value_or(""));
    }
    dtm.D = static_cast<int>(dtm.rows.size());
    dtm.V = vocab.size();
    return {std::move(vocab), std::move(dtm)};
}

SeedLexicon tfidf_seed_suggestion(const DocTermMatrix& dtm,
                                  const Vocabulary& vocab, int top_n) {
    if (!dtm.has_labels())
        throw std::runtime_error("tfidf_seed_suggestion: documents must be labeled");
    if (top_n < 1)
        throw std::runtime_error("tfidf_seed_suggestion: top_n must be >= 1");

    // Label-aggregated pseudo-documents.
    std::vector<std::string> names;
    std::unordered_map<std::string, int> name_idx;
    for (const std::string& label : dtm.labels) {
        if (!name_idx.count(label)) {
            name_idx.emplace(label, static_cast<int>(names.size()));
            names.push_back(label);
        }
    }
    const int C = static_cast<int>(names.size());
    std::vector<std::unordered_map<int, long long>> tf(C);
    std::vector<long long> global(dtm.V, 0);
    for (int d = 0; d < dtm.D; ++d) {
        const int c = name_idx.at(dtm.labels[d]);
        for (auto [v, y] : dtm.rows[d]) {
            tf[c][v] += y;
            global[v] += y;
        }
    }
    std::vector<int> df(dtm.V, 0);
    for (int c = 0; c < C; ++c)
        for (auto [v, y] : tf[c]) ++df[v];

    SeedLexicon lex;
    lex.topic_names = names;
    lex.seeds.resize(C);
    for (int c = 0; c < C; ++c) {
        struct Scored {
            double score;
            long long global;
            int term;
        };
        std::vector<Scored> scored;
        scored.reserve(tf[c].size());
        for (auto [v, y] : tf[c]) {
            const double idf = std::log((1.0 + C) / (1.0 + df[v])) + 1.0;
            scored.push_back({static_cast<double>(y) * idf, global[v], v});
        }
        std::sort(scored.begin(), scored.end(), [&](const Scored& l, const Scored& r) {
            if (l.score != r.score) return l.score > r.score;
            if (l.global != r.global) return l.global > r.global;
            return vocab.terms[l.term] < vocab.terms[r.term];
        });
        const int n = std::min<int>(top_n, static_cast<int>(scored.size()));
        if (n < top_n) {
            std::fprintf(stderr,
                         "warning: category '%s' has only %d distinct terms "
                         "(requested %d seeds)\n",
                         names[c].c_str(), n, top_n);
        }
        // Seeds kept in rank order.
        for (int i = 0; i < n; ++i) lex.seeds[c].push_back(scored[i].term);
    }
    return lex;
}

} // namespace spf
