#pragma once

#include "spf/inference.hpp"
#include "spf/model.hpp"
#include "spf/textprep.hpp"

#include <string>
#include <vector>

namespace spf {

// Posterior-mean intensities plus everything needed to report on them.
struct FittedModel {
    Mat theta_hat;      // D x K
    Mat beta_hat;       // K x V, beta_star_hat + beta_tilde_hat
    Mat beta_star_hat;  // K x V
    Mat beta_tilde_hat; // K x V, zero off the seeded cells
    Vocabulary vocabulary;
    SeedLexicon lexicon;
};

// theta_hat = shp/rte as reported by the model (the document-length factor
// in q's rate is deliberately not divided out; argmax and certainty are
// invariant to it). Set length_normalized for the exact variational mean
// shp/(N_d * rte).
FittedModel posterior_means(const VariationalParams& params, const ModelSpec& spec,
                            const DocTermMatrix& dtm, const Vocabulary& vocab,
                            bool length_normalized = false);

struct RankedTerm {
    std::string term;
    double intensity;
    bool is_seed;
};

// Terms of topic k by descending beta_hat; drop-list filtering happens
// before truncation. Ties go to the lower term id.
std::vector<RankedTerm> top_terms(const FittedModel& model, int k, int n,
                                  const std::vector<std::string>& drop = {});

struct Assignment {
    std::string doc_id;
    int topic;
    double certainty; // theta_hat[d, topic] / sum_k theta_hat[d, k]
};

// Argmax-topic assignment with ties broken by the lower topic index.
std::vector<Assignment> classify(const FittedModel& model,
                                 const std::vector<std::string>& doc_ids);

// Fold-in: fit theta for unseen documents with the topic-term parameters
// frozen, then return their posterior-mean intensities (D_new x K).
Mat score_new_documents(const VariationalParams& trained, const ModelSpec& spec,
                        const DocTermMatrix& new_dtm, const TrainConfig& cfg,
                        bool length_normalized = false);

} // namespace spf
