#pragma once

#include "spf/model.hpp"
#include "spf/rng.hpp"
#include "spf/textprep.hpp"

#include <cstdint>
#include <vector>

namespace spf {

struct TrainConfig {
    int epochs = 150;
    int batch_size = 1024;
    double learning_rate = 0.1;
    int mc_samples = 1;
    std::uint64_t rng_seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    // Leave-one-out baseline for the score estimator; needs mc_samples >= 2.
    bool loo_baseline = false;
};

// Flat layout of the variational parameter vector:
// [theta_shp | theta_rte | beta_shp | beta_rte | btilde_shp | btilde_rte].
struct ParamLayout {
    int D = 0, K = 0, V = 0;
    std::size_t S = 0;

    explicit ParamLayout(const ModelSpec& spec);

    std::size_t theta_shp(int d, int k) const;
    std::size_t theta_rte(int d, int k) const;
    std::size_t beta_shp(int k, int v) const;
    std::size_t beta_rte(int k, int v) const;
    std::size_t btilde_shp(std::size_t i) const;
    std::size_t btilde_rte(std::size_t i) const;
    std::size_t size() const;
};

std::vector<double> flatten_params(const VariationalParams& vp, const ParamLayout& L);
VariationalParams unflatten_params(const std::vector<double>& flat, const ParamLayout& L);

// Adam moments with per-coordinate step counters; coordinates with a zero
// gradient are skipped entirely (lazy sparse updates).
struct OptimizerState {
    std::vector<double> m, v;
    std::vector<long long> t;

    explicit OptimizerState(std::size_t n) : m(n, 0.0), v(n, 0.0), t(n, 0) {}
};

// One ascending Adam step on the (log-space) parameter vector.
void adam_step(OptimizerState& state, std::vector<double>& log_params,
               const std::vector<double>& grad, double learning_rate,
               const TrainConfig& cfg);

struct TrainTrace {
    std::vector<int> step_epoch;       // epoch index per step
    std::vector<double> step_elbo;     // per-step ELBO estimate
    std::vector<double> epoch_elbo;    // per-epoch mean of step estimates
    std::vector<double> epoch_seconds; // wall clock per epoch
};

// Batch-scaled reconstruction (D_total/|B|)·Σ_{d∈B} Σ_v log Pois(y_dv | λ_dv)
// at fixed sampled intensities; theta rows follow batch order (|B| x K).
// Averaging this over all equal-sized batches of a partition with shared
// samples reproduces the full-data reconstruction exactly.
double reconstruction_estimate(const DocTermMatrix& dtm, int D_total,
                               const std::vector<int>& batch, const Mat& theta,
                               const Mat& beta);

// Monte Carlo ELBO estimate over a document batch. The reconstruction,
// the theta prior and the theta entropy are restricted to the batch and
// scaled by D/|batch|; beta terms enter unscaled.
double elbo_estimate(const DocTermMatrix& dtm, const VariationalParams& params,
                     const ModelSpec& spec, const std::vector<int>& batch,
                     RandomState& rng, int mc_samples);

// Score-function gradient estimate, aligned with ParamLayout and expressed
// in the natural (shape/rate) parameter space. Coordinates of documents
// outside the batch are exactly zero.
std::vector<double> grad_estimate(const DocTermMatrix& dtm,
                                  const VariationalParams& params,
                                  const ModelSpec& spec,
                                  const std::vector<int>& batch,
                                  RandomState& rng, int mc_samples);

struct FitResult {
    VariationalParams params;
    TrainTrace trace;
};

// Minibatched BBVI training from the standard initialization.
FitResult train(const DocTermMatrix& dtm, const ModelSpec& spec,
                const TrainConfig& cfg);

// Training from given initial parameters; with update_globals = false the
// beta parameters stay frozen (fold-in of new documents).
FitResult train(const DocTermMatrix& dtm, const ModelSpec& spec,
                const TrainConfig& cfg, const VariationalParams& init,
                bool update_globals);

} // namespace spf
