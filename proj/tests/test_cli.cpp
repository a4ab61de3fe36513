#include "doctest.h"

#include "spf/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spf_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int counter;
};
int TempDir::counter = 0;

int run(const std::string& args) {
    const std::string cmd = std::string(SPF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string run_capture(const TempDir& dir, const std::string& args) {
    const std::string out_path = dir.file("__stdout");
    const std::string cmd =
        std::string(SPF_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Two label groups with disjoint content vocabulary; every content word
// appears at least twice so the frequency filter keeps it.
void write_toy_corpus(const std::string& path) {
    write_file(path,
               "doc_id,text,label\n"
               "d1,cat dog mat cat dog mat cat,pets\n"
               "d2,dog cat mat dog cat mat dog,pets\n"
               "d3,stock market trade stock market trade stock,finance\n"
               "d4,market stock trade market stock trade market,finance\n");
}

} // namespace

TEST_CASE("prepare writes a consistent DTM and is idempotent") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    const std::string base = "prepare --corpus " + dir.file("corpus.csv") +
                             " --min-doc-length 3 --out " + dir.file("prep");
    REQUIRE(run(base) == 0);

    const spf::DocTermMatrix dtm = spf::load_dtm(dir.file("prep.dtm"), dir.file("prep.docs"));
    CHECK(dtm.D == 4);
    CHECK(dtm.V == 6);
    std::size_t nnz = 0;
    for (const auto& row : dtm.rows) nnz += row.size();
    // Triplet header NNZ equals the number of data lines.
    std::istringstream header(slurp(dir.file("prep.dtm")));
    int D, V;
    std::size_t file_nnz;
    header >> D >> V >> file_nnz;
    CHECK(file_nnz == nnz);
    CHECK(dtm.labels == std::vector<std::string>{"pets", "pets", "finance", "finance"});

    const std::string first = slurp(dir.file("prep.dtm")) + slurp(dir.file("prep.vocab")) +
                              slurp(dir.file("prep.docs"));
    REQUIRE(run(base) == 0);
    CHECK(first == slurp(dir.file("prep.dtm")) + slurp(dir.file("prep.vocab")) +
                       slurp(dir.file("prep.docs")));
}

TEST_CASE("prepare drops short documents and reports the count") {
    TempDir dir;
    write_file(dir.file("corpus.csv"),
               "doc_id,text,label\n"
               "d1,cat dog mat cat dog mat cat,pets\n"
               "d2,dog cat mat dog cat mat dog,pets\n"
               "d3,cat dog,pets\n");
    const std::string out = run_capture(
        dir, "prepare --corpus " + dir.file("corpus.csv") + " --min-doc-length 3 --out " +
                 dir.file("prep"));
    CHECK(out.find("2 kept") != std::string::npos);
    CHECK(out.find("1 dropped") != std::string::npos);
    CHECK(spf::load_dtm(dir.file("prep.dtm")).D == 2);
}

TEST_CASE("seeds recovers the disjoint vocabulary split deterministically") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    REQUIRE(run("prepare --corpus " + dir.file("corpus.csv") +
                " --min-doc-length 3 --out " + dir.file("prep")) == 0);
    const std::string cmd = "seeds --dtm " + dir.file("prep.dtm") + " --docs " +
                            dir.file("prep.docs") + " --vocab " + dir.file("prep.vocab") +
                            " --top-n 3 --out " + dir.file("seeds.lex");
    REQUIRE(run(cmd) == 0);
    const std::string lex = slurp(dir.file("seeds.lex"));
    CHECK(lex.find("pets:") != std::string::npos);
    CHECK(lex.find("finance:") != std::string::npos);
    // Disjoint vocabularies: no pet word may seed finance or vice versa.
    std::istringstream lines(lex);
    std::string line;
    while (std::getline(lines, line)) {
        const bool pets_line = line.rfind("pets:", 0) == 0;
        for (const char* w : {"cat", "dog", "mat"})
            CHECK((line.find(w) != std::string::npos) == pets_line);
    }
    REQUIRE(run(cmd) == 0);
    CHECK(slurp(dir.file("seeds.lex")) == lex);
}

TEST_CASE("train is bit-deterministic and epochs=0 saves the initialization") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    REQUIRE(run("prepare --corpus " + dir.file("corpus.csv") +
                " --min-doc-length 3 --out " + dir.file("prep")) == 0);
    REQUIRE(run("seeds --dtm " + dir.file("prep.dtm") + " --docs " + dir.file("prep.docs") +
                " --vocab " + dir.file("prep.vocab") + " --top-n 2 --out " +
                dir.file("seeds.lex")) == 0);

    const std::string base = "train --dtm " + dir.file("prep.dtm") + " --vocab " +
                             dir.file("prep.vocab") + " --seeds " + dir.file("seeds.lex") +
                             " --epochs 10 --batch-size 4 --learning-rate 0.05 --seed 7";
    REQUIRE(run(base + " --out " + dir.file("m1.bin")) == 0);
    REQUIRE(run(base + " --out " + dir.file("m2.bin")) == 0);
    CHECK(slurp(dir.file("m1.bin")) == slurp(dir.file("m2.bin")));

    REQUIRE(run("train --dtm " + dir.file("prep.dtm") + " --vocab " + dir.file("prep.vocab") +
                " --seeds " + dir.file("seeds.lex") + " --epochs 0 --out " +
                dir.file("m0.bin")) == 0);
    const spf::SavedModel m0 = spf::load_model(dir.file("m0.bin"));
    CHECK(m0.meta.epochs == 0);
    CHECK(m0.params.theta_shp(0, 0) == 1.0); // untouched initialization
    CHECK(m0.params.beta_shp(0, 0) == 1.0);
}

TEST_CASE("a lexicon with an empty seed list trains an unseeded topic") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    REQUIRE(run("prepare --corpus " + dir.file("corpus.csv") +
                " --min-doc-length 3 --out " + dir.file("prep")) == 0);
    write_file(dir.file("seeds.lex"),
               "pets: cat, dog\n"
               "finance: stock, market\n"
               "other:\n");
    REQUIRE(run("train --dtm " + dir.file("prep.dtm") + " --vocab " + dir.file("prep.vocab") +
                " --seeds " + dir.file("seeds.lex") + " --epochs 3 --out " +
                dir.file("m.bin")) == 0);
    const spf::SavedModel m = spf::load_model(dir.file("m.bin"));
    CHECK(m.spec.K == 3);
    CHECK(m.spec.lexicon.seeds[2].empty());
}

TEST_CASE("topics, classify and evaluate compose through files") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    REQUIRE(run("prepare --corpus " + dir.file("corpus.csv") +
                " --min-doc-length 3 --out " + dir.file("prep")) == 0);
    REQUIRE(run("seeds --dtm " + dir.file("prep.dtm") + " --docs " + dir.file("prep.docs") +
                " --vocab " + dir.file("prep.vocab") + " --top-n 2 --out " +
                dir.file("seeds.lex")) == 0);
    REQUIRE(run("train --dtm " + dir.file("prep.dtm") + " --vocab " + dir.file("prep.vocab") +
                " --seeds " + dir.file("seeds.lex") +
                " --epochs 20 --batch-size 4 --learning-rate 0.05 --seed 1 --out " +
                dir.file("m.bin")) == 0);

    const std::string topics = run_capture(dir, "topics --model " + dir.file("m.bin") + " -n 3");
    CHECK(topics.find("pets") != std::string::npos);
    CHECK(topics.find("[seed]") != std::string::npos);

    REQUIRE(run("classify --model " + dir.file("m.bin") + " --docs " + dir.file("prep.docs") +
                " --out " + dir.file("assign.csv")) == 0);
    const auto assignments = spf::load_assignments(dir.file("assign.csv"));
    REQUIRE(assignments.size() == 4);
    CHECK(assignments[0].doc_id == "d1");

    const std::string report =
        run_capture(dir, "evaluate --assignments " + dir.file("assign.csv") + " --gold " +
                             dir.file("prep.docs") + " --out " + dir.file("report.csv"));
    CHECK(report.find("Accuracy:") != std::string::npos);
    CHECK(slurp(dir.file("report.csv")).find("accuracy,") != std::string::npos);
}

TEST_CASE("classify folds in new documents with frozen topics") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    REQUIRE(run("prepare --corpus " + dir.file("corpus.csv") +
                " --min-doc-length 3 --out " + dir.file("prep")) == 0);
    write_file(dir.file("seeds.lex"), "pets: cat, dog\nfinance: stock, market\n");
    REQUIRE(run("train --dtm " + dir.file("prep.dtm") + " --vocab " + dir.file("prep.vocab") +
                " --seeds " + dir.file("seeds.lex") +
                " --epochs 10 --batch-size 4 --learning-rate 0.05 --seed 1 --out " +
                dir.file("m.bin")) == 0);

    // One new document over the same vocabulary (V = 6, term ids from prep).
    write_file(dir.file("new.dtm"), "1 6 2\n0 0 5\n0 1 3\n");
    REQUIRE(run("classify --model " + dir.file("m.bin") + " --dtm " + dir.file("new.dtm") +
                " --fold-in --epochs 50 --learning-rate 0.05 --seed 2 --out " +
                dir.file("new.csv")) == 0);
    CHECK(spf::load_assignments(dir.file("new.csv")).size() == 1);

    // Without --fold-in a mismatched DTM is an error.
    CHECK(run("classify --model " + dir.file("m.bin") + " --dtm " + dir.file("new.dtm") +
              " --out " + dir.file("bad.csv")) != 0);
}

TEST_CASE("synth writes a trainable corpus with ground truth") {
    TempDir dir;
    REQUIRE(run("synth -D 30 -V 12 -K 2 --seeds-per-topic 2 --seed 4 --out " +
                dir.file("syn")) == 0);
    const spf::DocTermMatrix dtm = spf::load_dtm(dir.file("syn.dtm"), dir.file("syn.docs"));
    CHECK(dtm.D == 30);
    CHECK(dtm.V == 12);
    CHECK(dtm.has_labels());
    CHECK(slurp(dir.file("syn.lexicon")).find("topic0: w0, w1") != std::string::npos);
    // Ground-truth matrices have one row per document / topic.
    std::istringstream theta(slurp(dir.file("syn.theta.csv")));
    std::string line;
    int rows = 0;
    while (std::getline(theta, line)) ++rows;
    CHECK(rows == 30);

    REQUIRE(run("train --dtm " + dir.file("syn.dtm") + " --vocab " + dir.file("syn.vocab") +
                " --seeds " + dir.file("syn.lexicon") + " --epochs 2 --out " +
                dir.file("m.bin")) == 0);
}

TEST_CASE("a config file supplies defaults and flags override it") {
    TempDir dir;
    write_toy_corpus(dir.file("corpus.csv"));
    REQUIRE(run("prepare --corpus " + dir.file("corpus.csv") +
                " --min-doc-length 3 --out " + dir.file("prep")) == 0);
    write_file(dir.file("seeds.lex"), "pets: cat, dog\nfinance: stock, market\n");
    write_file(dir.file("train.cfg"),
               "train.epochs=4\ntrain.seed=9\ntrain.learning-rate=0.05\n");

    const std::string base = "--config " + dir.file("train.cfg") + " train --dtm " +
                             dir.file("prep.dtm") + " --vocab " + dir.file("prep.vocab") +
                             " --seeds " + dir.file("seeds.lex");
    REQUIRE(run(base + " --out " + dir.file("m1.bin")) == 0);
    CHECK(spf::load_model(dir.file("m1.bin")).meta.epochs == 4);

    REQUIRE(run(base + " --epochs 2 --out " + dir.file("m2.bin")) == 0);
    CHECK(spf::load_model(dir.file("m2.bin")).meta.epochs == 2); // flag wins
}

TEST_CASE("errors exit nonzero") {
    TempDir dir;
    CHECK(run("train --dtm /nonexistent --vocab /nonexistent --seeds /nonexistent --out x") != 0);
    CHECK(run("evaluate --assignments /nonexistent --gold /nonexistent") != 0);
    CHECK(run("") != 0); // a subcommand is required
}
