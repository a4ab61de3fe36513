#include "spf/inference.hpp"

#include "spf/specfun.hpp"
#include "spf/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spf {

ParamLayout::ParamLayout(const ModelSpec& spec)
    : D(spec.D), K(spec.K), V(spec.V), S(spec.seed_pairs().size()) {}

std::size_t ParamLayout::theta_shp(int d, int k) const {
    return static_cast<std::size_t>(d) * K + k;
}
std::size_t ParamLayout::theta_rte(int d, int k) const {
    return static_cast<std::size_t>(D) * K + static_cast<std::size_t>(d) * K + k;
}
std::size_t ParamLayout::beta_shp(int k, int v) const {
    return 2ull * D * K + static_cast<std::size_t>(k) * V + v;
}
std::size_t ParamLayout::beta_rte(int k, int v) const {
    return 2ull * D * K + static_cast<std::size_t>(K) * V +
           static_cast<std::size_t>(k) * V + v;
}
std::size_t ParamLayout::btilde_shp(std::size_t i) const {
    return 2ull * D * K + 2ull * K * V + i;
}
std::size_t ParamLayout::btilde_rte(std::size_t i) const {
    return 2ull * D * K + 2ull * K * V + S + i;
}
std::size_t ParamLayout::size() const {
    return 2ull * D * K + 2ull * K * V + 2ull * S;
}

std::vector<double> flatten_params(const VariationalParams& vp, const ParamLayout& L) {
    std::vector<double> flat(L.size());
    std::copy(vp.theta_shp.data.begin(), vp.theta_shp.data.end(),
              flat.begin() + L.theta_shp(0, 0));
    std::copy(vp.theta_rte.data.begin(), vp.theta_rte.data.end(),
              flat.begin() + L.theta_rte(0, 0));
    std::copy(vp.beta_shp.data.begin(), vp.beta_shp.data.end(),
              flat.begin() + L.beta_shp(0, 0));
    std::copy(vp.beta_rte.data.begin(), vp.beta_rte.data.end(),
              flat.begin() + L.beta_rte(0, 0));
    std::copy(vp.btilde_shp.begin(), vp.btilde_shp.end(),
              flat.begin() + L.btilde_shp(0));
    std::copy(vp.btilde_rte.begin(), vp.btilde_rte.end(),
              flat.begin() + L.btilde_rte(0));
    return flat;
}

VariationalParams unflatten_params(const std::vector<double>& flat, const ParamLayout& L) {
    VariationalParams vp;
    vp.theta_shp = Mat(L.D, L.K);
    vp.theta_rte = Mat(L.D, L.K);
    vp.beta_shp = Mat(L.K, L.V);
    vp.beta_rte = Mat(L.K, L.V);
    vp.btilde_shp.resize(L.S);
    vp.btilde_rte.resize(L.S);
    std::copy_n(flat.begin() + L.theta_shp(0, 0), vp.theta_shp.data.size(),
                vp.theta_shp.data.begin());
    std::copy_n(flat.begin() + L.theta_rte(0, 0), vp.theta_rte.data.size(),
                vp.theta_rte.data.begin());
    std::copy_n(flat.begin() + L.beta_shp(0, 0), vp.beta_shp.data.size(),
                vp.beta_shp.data.begin());
    std::copy_n(flat.begin() + L.beta_rte(0, 0), vp.beta_rte.data.size(),
                vp.beta_rte.data.begin());
    std::copy_n(flat.begin() + L.btilde_shp(0), L.S, vp.btilde_shp.begin());
    std::copy_n(flat.begin() + L.btilde_rte(0), L.S, vp.btilde_rte.begin());
    return vp;
}

void adam_step(OptimizerState& state, std::vector<double>& log_params,
               const std::vector<double>& grad, double learning_rate,
               const TrainConfig& cfg) {
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        if (g == 0.0) continue; // lazy: untouched coordinates keep state
        const long long t = ++state.t[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double mhat = state.m[i] / (1.0 - std::pow(b1, static_cast<double>(t)));
        const double vhat = state.v[i] / (1.0 - std::pow(b2, static_cast<double>(t)));
        log_params[i] += learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
    }
}

double reconstruction_estimate(const DocTermMatrix& dtm, int D_total,
                               const std::vector<int>& batch, const Mat& theta,
                               const Mat& beta) {
    if (batch.empty())
        throw std::runtime_error("reconstruction_estimate: empty batch");
    const int K = beta.rows, V = beta.cols;
    const double scale = static_cast<double>(D_total) / batch.size();

    // Zero-count terms only contribute -lambda, which aggregates to
    // -sum_k theta_dk * rowsum_k; y ln(lambda) is evaluated at nonzeros.
    std::vector<double> row_sum(K, 0.0);
    for (int k = 0; k < K; ++k)
        row_sum[k] = std::accumulate(beta.data.begin() + static_cast<std::size_t>(k) * V,
                                     beta.data.begin() + static_cast<std::size_t>(k + 1) * V,
                                     0.0);

    double recon = 0.0;
    for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        const int d = batch[bi];
        double lam_total = 0.0;
        for (int k = 0; k < K; ++k)
            lam_total += theta(static_cast<int>(bi), k) * row_sum[k];
        recon -= lam_total;
        for (auto [v, y] : dtm.rows[d]) {
            double lam = 0.0;
            for (int k = 0; k < K; ++k)
                lam += theta(static_cast<int>(bi), k) * beta(k, v);
            // Products of two near-underflow draws can hit exact zero.
            lam = std::max(lam, std::numeric_limits<double>::min());
            recon += y * std::log(lam) - log_gamma(static_cast<double>(y) + 1.0);
        }
    }
    return scale * recon;
}

namespace {

// Effective document length; empty documents fall back to 1 so the
// variational rate stays positive.
double doc_length(const DocTermMatrix& dtm, int d) {
    return dtm.totals[d] > 0 ? static_cast<double>(dtm.totals[d]) : 1.0;
}

struct JointSample {
    std::vector<double> beta_star;  // K*V row-major
    std::vector<double> beta_tilde; // |S|
    std::vector<double> theta;      // |batch|*K, batch order
};

class Engine {
public:
    Engine(const DocTermMatrix& dtm, const ModelSpec& spec)
        : dtm_(dtm), spec_(spec), L_(spec), pairs_(spec.seed_pairs()),
          seed_idx_(static_cast<std::size_t>(spec.K) * spec.V, -1) {
        if (dtm.D != spec.D || dtm.V != spec.V)
            throw std::runtime_error("inference: DTM dimensions do not match spec");
        for (std::size_t i = 0; i < pairs_.size(); ++i)
            seed_idx_[static_cast<std::size_t>(pairs_[i].first) * spec.V +
                      pairs_[i].second] = static_cast<int>(i);
    }

    const ParamLayout& layout() const { return L_; }

    // Sampling order matches the generative sweep: all (k, v) beta draws
    // (seeded boost right after its beta-star), then theta per batch doc.
    JointSample sample(const std::vector<double>& phi,
                       const std::vector<int>& batch, RandomState& rng) const {
        JointSample s;
        s.beta_star.resize(static_cast<std::size_t>(L_.K) * L_.V);
        s.beta_tilde.resize(L_.S);
        s.theta.resize(batch.size() * L_.K);
        for (int k = 0; k < L_.K; ++k) {
            for (int v = 0; v < L_.V; ++v) {
                s.beta_star[static_cast<std::size_t>(k) * L_.V + v] = gamma_sample(
                    {phi[L_.beta_shp(k, v)], phi[L_.beta_rte(k, v)]}, rng);
                const int si = seed_idx_[static_cast<std::size_t>(k) * L_.V + v];
                if (si >= 0)
                    s.beta_tilde[si] = gamma_sample(
                        {phi[L_.btilde_shp(si)], phi[L_.btilde_rte(si)]}, rng);
            }
        }
        for (std::size_t bi = 0; bi < batch.size(); ++bi) {
            const int d = batch[bi];
            const double nd = doc_length(dtm_, d);
            for (int k = 0; k < L_.K; ++k)
                s.theta[bi * L_.K + k] = gamma_sample(
                    {phi[L_.theta_shp(d, k)], nd * phi[L_.theta_rte(d, k)]}, rng);
        }
        return s;
    }

    // f = scale * (reconstruction + theta prior - theta entropy) over the
    // batch, plus unscaled beta prior minus beta entropy.
    double f_value(const std::vector<double>& phi, const std::vector<int>& batch,
                   const JointSample& s) const {
        const PriorConfig& p = spec_.priors;
        const double scale = static_cast<double>(spec_.D) / batch.size();

        Mat beta(L_.K, L_.V);
        beta.data = s.beta_star;
        for (std::size_t i = 0; i < pairs_.size(); ++i)
            beta(pairs_[i].first, pairs_[i].second) += s.beta_tilde[i];
        Mat theta(static_cast<int>(batch.size()), L_.K);
        theta.data = s.theta;
        const double recon_scaled =
            reconstruction_estimate(dtm_, spec_.D, batch, theta, beta);

        double logp_theta = 0.0, logq_theta = 0.0;
        for (std::size_t bi = 0; bi < batch.size(); ++bi) {
            const int d = batch[bi];
            const double* th = &s.theta[bi * L_.K];
            const double nd = doc_length(dtm_, d);
            for (int k = 0; k < L_.K; ++k) {
                logp_theta += gamma_logpdf(th[k], {p.e, p.f});
                logq_theta += gamma_logpdf(
                    th[k], {phi[L_.theta_shp(d, k)], nd * phi[L_.theta_rte(d, k)]});
            }
        }

        double logp_beta = 0.0, logq_beta = 0.0;
        for (int k = 0; k < L_.K; ++k) {
            for (int v = 0; v < L_.V; ++v) {
                const double x = s.beta_star[static_cast<std::size_t>(k) * L_.V + v];
                logp_beta += gamma_logpdf(x, {p.a, p.b});
                logq_beta += gamma_logpdf(x, {phi[L_.beta_shp(k, v)], phi[L_.beta_rte(k, v)]});
            }
        }
        for (std::size_t i = 0; i < L_.S; ++i) {
            logp_beta += gamma_logpdf(s.beta_tilde[i], {p.c, p.d});
            logq_beta += gamma_logpdf(
                s.beta_tilde[i], {phi[L_.btilde_shp(i)], phi[L_.btilde_rte(i)]});
        }

        const double f = recon_scaled + scale * (logp_theta - logq_theta) +
                         logp_beta - logq_beta;
        if (!std::isfinite(f))
            throw std::runtime_error(
                "inference: non-finite ELBO estimate (recon=" + std::to_string(recon_scaled) +
                ", logp_theta=" + std::to_string(logp_theta) +
                ", logq=" + std::to_string(logq_theta + logq_beta) + ")");
        return f;
    }

    // Adds weight * score(sample; phi) to grad for every touched coordinate.
    void add_scores(const std::vector<double>& phi, const std::vector<int>& batch,
                    const JointSample& s, double weight, bool update_globals,
                    std::vector<double>& grad) const {
        if (update_globals) {
            for (int k = 0; k < L_.K; ++k) {
                for (int v = 0; v < L_.V; ++v) {
                    const double x = s.beta_star[static_cast<std::size_t>(k) * L_.V + v];
                    const GammaScore gs = gamma_score_grad(
                        x, {phi[L_.beta_shp(k, v)], phi[L_.beta_rte(k, v)]});
                    grad[L_.beta_shp(k, v)] += weight * gs.d_shape;
                    grad[L_.beta_rte(k, v)] += weight * gs.d_rate;
                }
            }
            for (std::size_t i = 0; i < L_.S; ++i) {
                const GammaScore gs = gamma_score_grad(
                    s.beta_tilde[i], {phi[L_.btilde_shp(i)], phi[L_.btilde_rte(i)]});
                grad[L_.btilde_shp(i)] += weight * gs.d_shape;
                grad[L_.btilde_rte(i)] += weight * gs.d_rate;
            }
        }
        for (std::size_t bi = 0; bi < batch.size(); ++bi) {
            const int d = batch[bi];
            const double nd = doc_length(dtm_, d);
            for (int k = 0; k < L_.K; ++k) {
                const double x = s.theta[bi * L_.K + k];
                const GammaScore gs = gamma_score_grad(
                    x, {phi[L_.theta_shp(d, k)], nd * phi[L_.theta_rte(d, k)]});
                grad[L_.theta_shp(d, k)] += weight * gs.d_shape;
                // chain factor N_d from the length-scaled variational rate
                grad[L_.theta_rte(d, k)] += weight * gs.d_rate * nd;
            }
        }
    }

    // Joint ELBO / gradient evaluation over mc_samples draws. grad, when
    // non-null, is accumulated into (touched coordinates only).
    double evaluate(const std::vector<double>& phi, const std::vector<int>& batch,
                    RandomState& rng, int mc_samples, bool loo_baseline,
                    bool update_globals, std::vector<double>* grad) const {
        if (batch.empty())
            throw std::runtime_error("inference: empty batch");
        if (mc_samples < 1)
            throw std::runtime_error("inference: mc_samples must be >= 1");
        if (loo_baseline && mc_samples < 2)
            throw std::runtime_error("inference: leave-one-out baseline needs mc_samples >= 2");

        std::vector<JointSample> samples;
        std::vector<double> fs;
        samples.reserve(mc_samples);
        fs.reserve(mc_samples);
        for (int s = 0; s < mc_samples; ++s) {
            samples.push_back(sample(phi, batch, rng));
            fs.push_back(f_value(phi, batch, samples.back()));
        }
        const double f_sum = std::accumulate(fs.begin(), fs.end(), 0.0);
        if (grad) {
            for (int s = 0; s < mc_samples; ++s) {
                double w = fs[s];
                if (loo_baseline)
                    w -= (f_sum - fs[s]) / (mc_samples - 1);
                add_scores(phi, batch, samples[s], w / mc_samples, update_globals, *grad);
            }
        }
        return f_sum / mc_samples;
    }

private:
    const DocTermMatrix& dtm_;
    const ModelSpec& spec_;
    ParamLayout L_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<int> seed_idx_;
};

} // namespace

double elbo_estimate(const DocTermMatrix& dtm, const VariationalParams& params,
                     const ModelSpec& spec, const std::vector<int>& batch,
                     RandomState& rng, int mc_samples) {
    Engine engine(dtm, spec);
    const std::vector<double> phi = flatten_params(params, engine.layout());
    return engine.evaluate(phi, batch, rng, mc_samples, false, true, nullptr);
}

std::vector<double> grad_estimate(const DocTermMatrix& dtm,
                                  const VariationalParams& params,
                                  const ModelSpec& spec,
                                  const std::vector<int>& batch,
                                  RandomState& rng, int mc_samples) {
    Engine engine(dtm, spec);
    const std::vector<double> phi = flatten_params(params, engine.layout());
    std::vector<double> grad(engine.layout().size(), 0.0);
    engine.evaluate(phi, batch, rng, mc_samples, false, true, &grad);
    return grad;
}

FitResult train(const DocTermMatrix& dtm, const ModelSpec& spec,
                const TrainConfig& cfg) {
    return train(dtm, spec, cfg, init_variational(spec), true);
}

FitResult train(const DocTermMatrix& dtm, const ModelSpec& spec,
                const TrainConfig& cfg, const VariationalParams& init,
                bool update_globals) {
    spec.validate();
    if (cfg.epochs < 0) throw std::runtime_error("train: epochs must be >= 0");
    if (cfg.batch_size < 1) throw std::runtime_error("train: batch_size must be >= 1");

    Engine engine(dtm, spec);
    const ParamLayout& L = engine.layout();
    std::vector<double> phi = flatten_params(init, L);
    std::vector<double> u(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(phi[i] > 0.0))
            throw std::runtime_error("train: initial parameters must be > 0");
        u[i] = std::log(phi[i]);
    }

    OptimizerState opt(L.size());
    std::vector<double> grad(L.size(), 0.0);
    TrainTrace trace;
    const RandomState root(cfg.rng_seed);
    const int batch_size = std::min(cfg.batch_size, spec.D);

    // Touched beta coordinates are the same every step.
    std::vector<std::size_t> beta_coords;
    if (update_globals) {
        beta_coords.reserve(2ull * L.K * L.V + 2 * L.S);
        for (std::size_t i = L.beta_shp(0, 0); i < L.size(); ++i)
            beta_coords.push_back(i);
    }

    long long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        RandomState shuffle_rng = root.fork("shuffle", static_cast<std::uint64_t>(epoch));
        std::vector<int> order(spec.D);
        std::iota(order.begin(), order.end(), 0);
        for (int i = spec.D - 1; i > 0; --i) {
            const int j = static_cast<int>(shuffle_rng.next_u64() % (i + 1));
            std::swap(order[i], order[j]);
        }

        double epoch_sum = 0.0;
        int epoch_steps = 0;
        for (int start = 0; start < spec.D; start += batch_size) {
            const int stop = std::min(start + batch_size, spec.D);
            const std::vector<int> batch(order.begin() + start, order.begin() + stop);

            RandomState step_rng = root.fork("step", static_cast<std::uint64_t>(step));
            for (std::size_t i : beta_coords) grad[i] = 0.0;
            for (int d : batch)
                for (int k = 0; k < L.K; ++k) {
                    grad[L.theta_shp(d, k)] = 0.0;
                    grad[L.theta_rte(d, k)] = 0.0;
                }

            const double elbo = engine.evaluate(phi, batch, step_rng, cfg.mc_samples,
                                                cfg.loo_baseline, update_globals, &grad);

            // Chain rule into log space, ascend, refresh natural parameters.
            auto apply = [&](std::size_t i) {
                grad[i] *= phi[i];
            };
            for (std::size_t i : beta_coords) apply(i);
            for (int d : batch)
                for (int k = 0; k < L.K; ++k) {
                    apply(L.theta_shp(d, k));
                    apply(L.theta_rte(d, k));
                }
            adam_step(opt, u, grad, cfg.learning_rate, cfg);
            auto refresh = [&](std::size_t i) {
                phi[i] = std::exp(u[i]);
                if (!std::isfinite(phi[i]) || !(phi[i] > 0.0))
                    throw std::runtime_error(
                        "train: parameters diverged at step " + std::to_string(step));
            };
            for (std::size_t i : beta_coords) refresh(i);
            for (int d : batch)
                for (int k = 0; k < L.K; ++k) {
                    refresh(L.theta_shp(d, k));
                    refresh(L.theta_rte(d, k));
                }

            trace.step_epoch.push_back(epoch);
            trace.step_elbo.push_back(elbo);
            epoch_sum += elbo;
            ++epoch_steps;
            ++step;
        }
        trace.epoch_elbo.push_back(epoch_sum / epoch_steps);
        trace.epoch_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }

    return {unflatten_params(phi, L), std::move(trace)};
}

} // namespace spf
