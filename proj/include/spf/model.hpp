#pragma once

#include "spf/rng.hpp"
#include "spf/textprep.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace spf {

// Dense row-major matrix of doubles; just enough for intensity grids.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) {
        return data[static_cast<std::size_t>(i) * cols + j];
    }
    double operator()(int i, int j) const {
        return data[static_cast<std::size_t>(i) * cols + j];
    }
};

// Gamma hyperparameters of the model: (a, b) for neutral topic-term
// intensities, (c, d) for seeded boosts, (e, f) for document-topic
// intensities. Defaults give sparse representations with emphasized seeds.
struct PriorConfig {
    double a = 0.3;
    double b = 0.3;
    double c = 1.0;
    double d = 0.3;
    double e = 0.3;
    double f = 0.3;
};

struct ModelSpec {
    int D = 0;
    int V = 0;
    int K = 0;
    PriorConfig priors;
    SeedLexicon lexicon;

    // Seeded (topic, term) pairs in row-major order (topic, then term id).
    // This fixed ordering aligns the beta-tilde vectors everywhere.
    std::vector<std::pair<int, int>> seed_pairs() const;

    // Validates dimensions and seed term ids; warns when c <= a.
    void validate() const;
};

// Gamma shape/rate variational parameters. q(theta_dk) carries an extra
// document-length factor on the rate: Gamma(theta_shp, N_d * theta_rte).
struct VariationalParams {
    Mat theta_shp, theta_rte;              // D x K
    Mat beta_shp, beta_rte;                // K x V
    std::vector<double> btilde_shp, btilde_rte; // |S|, seed_pairs() order
};

// theta_shp = 1, theta_rte = D/1000, beta_shp = 1, beta_rte = 2D/1000,
// btilde_shp = btilde_rte = 1.
VariationalParams init_variational(const ModelSpec& spec);

// beta = beta_star, plus beta_tilde on the seeded cells.
Mat compose_beta(const Mat& beta_star, const std::vector<double>& beta_tilde,
                 const std::vector<std::pair<int, int>>& seed_pairs);

// Sum of gamma log-densities of all latents under the model priors.
// theta may cover a document subset (its rows are whatever the caller
// passes); minibatch scaling is applied by the caller.
double log_prior(const Mat& theta, const Mat& beta_star,
                 const std::vector<double>& beta_tilde, const ModelSpec& spec);

struct SyntheticData {
    DocTermMatrix dtm;
    Mat theta; // D x K ground truth
    Mat beta;  // K x V ground truth (composed)
};

// Forward simulation of the generative process.
SyntheticData generate_synthetic(const ModelSpec& spec, RandomState& rng);

} // namespace spf
