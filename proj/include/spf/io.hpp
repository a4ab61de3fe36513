#pragma once

#include "spf/inference.hpp"
#include "spf/model.hpp"
#include "spf/posterior.hpp"
#include "spf/textprep.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spf {

// CSV/TSV corpus with columns (doc_id, text[, label]); delimiter inferred
// from the header line. A header is required.
RawCorpus read_corpus(const std::string& path);

void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

// Sparse triplet format: header "D V NNZ", then "d v count" per line,
// 0-indexed.
void save_dtm(const DocTermMatrix& dtm, const std::string& path);
// doc_ids/labels live in a sidecar TSV (doc_id <tab> label).
void save_doc_table(const DocTermMatrix& dtm, const std::string& path);
DocTermMatrix load_dtm(const std::string& dtm_path,
                       const std::string& doc_table_path = "");

// One line per topic: "name: w1, w2, ...". Empty seed lists are allowed
// ("name:" alone).
void save_lexicon(const SeedLexicon& lex, const Vocabulary& vocab,
                  const std::string& path);
SeedLexicon load_lexicon(const std::string& path, const Vocabulary& vocab);

struct TrainMeta {
    int epochs = 0;
    double final_elbo = 0.0;
    std::uint64_t rng_seed = 0;
};

struct SavedModel {
    ModelSpec spec;
    Vocabulary vocabulary;
    VariationalParams params;
    TrainMeta meta;
};

// Versioned binary container; floats round-trip bit-exactly and the byte
// stream is deterministic for identical inputs.
void save_model(const SavedModel& model, const std::string& path);
SavedModel load_model(const std::string& path);

void save_trace(const TrainTrace& trace, const std::string& path);

void save_assignments(const std::vector<Assignment>& assignments,
                      const std::vector<std::string>& topic_names,
                      const std::string& path);
struct LoadedAssignment {
    std::string doc_id;
    std::string topic_name;
    double certainty;
};
std::vector<LoadedAssignment> load_assignments(const std::string& path);

} // namespace spf
