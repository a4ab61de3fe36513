#include "doctest.h"

#include "spf/textprep.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace spf;

namespace {

RawCorpus corpus_of(std::vector<std::pair<std::string, std::string>> docs) {
    RawCorpus raw;
    for (auto& [text, label] : docs) {
        RawDoc d;
        d.id = "d" + std::to_string(raw.docs.size());
        d.text = text;
        if (!label.empty()) d.label = label;
        raw.docs.push_back(std::move(d));
    }
    return raw;
}

TokenizedCorpus tokens_of(std::vector<std::vector<std::string>> docs) {
    TokenizedCorpus c;
    for (auto& toks : docs) {
        TokenizedDoc d;
        d.id = "d" + std::to_string(c.docs.size());
        d.tokens = std::move(toks);
        c.docs.push_back(std::move(d));
    }
    return c;
}

} // namespace

TEST_CASE("preprocess lowercases and removes stop words") {
    PreprocessOptions opts;
    opts.stop_words = {"the"};
    opts.min_term_frequency = 1;
    opts.min_doc_length = 1;
    const auto out = preprocess(corpus_of({{"The DOG ran", ""}}), opts);
    REQUIRE(out.docs.size() == 1);
    CHECK(out.docs[0].tokens == std::vector<std::string>{"dog", "ran"});
}

TEST_CASE("preprocess drops terms below the global frequency threshold") {
    PreprocessOptions opts;
    opts.stop_words = {"-none-"};
    opts.min_term_frequency = 2;
    opts.min_doc_length = 1;
    const auto out = preprocess(
        corpus_of({{"zebra lion lion", ""}, {"lion tiger tiger", ""}}), opts);
    for (const auto& d : out.docs)
        for (const auto& t : d.tokens) CHECK(t != "zebra");
}

TEST_CASE("preprocess drops short documents and errors on an empty corpus") {
    PreprocessOptions opts;
    opts.stop_words = {"-none-"};
    opts.min_term_frequency = 1;
    opts.min_doc_length = 3;
    const auto out = preprocess(
        corpus_of({{"alpha beta gamma", ""}, {"alpha beta", ""}}), opts);
    CHECK(out.docs.size() == 1);

    opts.min_doc_length = 10;
    CHECK_THROWS_AS(
        preprocess(corpus_of({{"alpha beta gamma", ""}}), opts),
        std::runtime_error);
}

TEST_CASE("tokenizer keeps pure-alphabetic tokens of length >= 2") {
    PreprocessOptions opts;
    opts.stop_words = {"-none-"};
    opts.min_term_frequency = 1;
    opts.min_doc_length = 1;
    const auto out = preprocess(corpus_of({{"a b2c dog-house x 42 hello!", ""}}), opts);
    REQUIRE(out.docs.size() == 1);
    CHECK(out.docs[0].tokens == std::vector<std::string>{"dog", "house", "hello"});
}

TEST_CASE("build_dtm counts token multiplicities") {
    const auto [vocab, dtm] = build_dtm(tokens_of({{"a", "b", "a"}, {"b"}}));
    CHECK(vocab.size() == 2);
    CHECK(dtm.D == 2);
    CHECK(dtm.V == 2);
    CHECK(dtm.totals == std::vector<long long>{3, 1});
    const int a = vocab.index.at("a"), b = vocab.index.at("b");
    REQUIRE(dtm.rows[0].size() == 2);
    for (auto [v, c] : dtm.rows[0]) CHECK(c == (v == a ? 2 : 1));
    REQUIRE(dtm.rows[1].size() == 1);
    CHECK(dtm.rows[1][0] == std::pair<int, int>{b, 1});
}

TEST_CASE("build_dtm single doc single term") {
    const auto [vocab, dtm] = build_dtm(tokens_of({{"x"}}));
    CHECK(dtm.D == 1);
    CHECK(dtm.V == 1);
    CHECK(dtm.rows[0] == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("build_dtm with disjoint vocabularies is block-diagonal") {
    const auto [vocab, dtm] =
        build_dtm(tokens_of({{"aa", "ab"}, {"ba", "bb", "bc"}, {"ca"}}));
    CHECK(vocab.size() == 6);
    for (int d = 0; d < dtm.D; ++d)
        for (int e = d + 1; e < dtm.D; ++e)
            for (auto [v1, c1] : dtm.rows[d])
                for (auto [v2, c2] : dtm.rows[e]) CHECK(v1 != v2);
}

TEST_CASE("total token count is preserved through build_dtm") {
    PreprocessOptions opts;
    opts.min_term_frequency = 1;
    opts.min_doc_length = 1;
    const auto corpus = preprocess(
        corpus_of({{"red fish blue fish", ""}, {"one fish two fish", ""}}), opts);
    std::size_t tokens = 0;
    for (const auto& d : corpus.docs) tokens += d.tokens.size();
    const auto [vocab, dtm] = build_dtm(corpus);
    const long long total = std::accumulate(dtm.totals.begin(), dtm.totals.end(), 0LL);
    CHECK(static_cast<std::size_t>(total) == tokens);
}

TEST_CASE("tfidf seeds: disjoint categories pick their own terms") {
    TokenizedCorpus c;
    for (int i = 0; i < 10; ++i) {
        c.docs.push_back({"a" + std::to_string(i), {"dog"}, "A"});
        c.docs.push_back({"b" + std::to_string(i), {"cat"}, "B"});
    }
    const auto [vocab, dtm] = build_dtm(c);
    const auto lex = tfidf_seed_suggestion(dtm, vocab, 1);
    REQUIRE(lex.K() == 2);
    const int a = lex.topic_names[0] == "A" ? 0 : 1;
    CHECK(vocab.terms[lex.seeds[a][0]] == "dog");
    CHECK(vocab.terms[lex.seeds[1 - a][0]] == "cat");
}

TEST_CASE("tfidf seeds: a uniform term ranks below a category-exclusive one") {
    // Three categories; "common" appears in all with the same count as the
    // exclusive term of each category. Brute-force tf-idf oracle:
    // score(term) = tf * (ln((1 + C) / (1 + df)) + 1).
    TokenizedCorpus c;
    const char* names[3] = {"A", "B", "C"};
    const char* exclusive[3] = {"alpha", "beta", "gamma"};
    for (int k = 0; k < 3; ++k) {
        TokenizedDoc d;
        d.id = names[k];
        d.label = names[k];
        for (int i = 0; i < 5; ++i) d.tokens.push_back("common");
        for (int i = 0; i < 5; ++i) d.tokens.push_back(exclusive[k]);
        c.docs.push_back(std::move(d));
    }
    const auto [vocab, dtm] = build_dtm(c);

    const double idf_excl = std::log(4.0 / 2.0) + 1.0;
    const double idf_comm = std::log(4.0 / 4.0) + 1.0;
    CHECK(5.0 * idf_excl > 5.0 * idf_comm);

    const auto lex = tfidf_seed_suggestion(dtm, vocab, 2);
    for (int k = 0; k < 3; ++k) {
        REQUIRE(lex.seeds[k].size() == 2);
        // exclusive term first, common term second
        int ki = -1;
        for (int i = 0; i < 3; ++i)
            if (lex.topic_names[k] == names[i]) ki = i;
        CHECK(vocab.terms[lex.seeds[k][0]] == exclusive[ki]);
        CHECK(vocab.terms[lex.seeds[k][1]] == "common");
    }
}

TEST_CASE("tfidf seeds are deterministic and may overlap across topics") {
    TokenizedCorpus c;
    c.docs.push_back({"a", {"shared", "only"}, "A"});
    c.docs.push_back({"b", {"shared", "unique"}, "B"});
    const auto [vocab, dtm] = build_dtm(c);
    const auto l1 = tfidf_seed_suggestion(dtm, vocab, 2);
    const auto l2 = tfidf_seed_suggestion(dtm, vocab, 2);
    CHECK(l1.seeds == l2.seeds);
    CHECK(l1.topic_names == l2.topic_names);
    // "shared" may be selected for both categories
    int shared_uses = 0;
    for (int k = 0; k < l1.K(); ++k)
        for (int v : l1.seeds[k])
            if (vocab.terms[v] == "shared") ++shared_uses;
    CHECK(shared_uses == 2);
}

TEST_CASE("tfidf seeds: fewer terms than requested returns all available") {
    TokenizedCorpus c;
    c.docs.push_back({"a", {"one", "two"}, "A"});
    const auto [vocab, dtm] = build_dtm(c);
    const auto lex = tfidf_seed_suggestion(dtm, vocab, 10);
    REQUIRE(lex.K() == 1);
    CHECK(lex.seeds[0].size() == 2);
}

TEST_CASE("tfidf seeds require labels and positive top_n") {
    const auto [vocab, dtm] = build_dtm(tokens_of({{"aa", "bb"}}));
    CHECK_THROWS_AS(tfidf_seed_suggestion(dtm, vocab, 1), std::runtime_error);
}
