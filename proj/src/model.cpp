#include "spf/model.hpp"

#include "spf/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace spf {

std::vector<std::pair<int, int>> ModelSpec::seed_pairs() const {
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < lexicon.K(); ++k) {
        std::vector<int> terms = lexicon.seeds[k];
        std::sort(terms.begin(), terms.end());
        for (int v : terms) pairs.emplace_back(k, v);
    }
    return pairs;
}

void ModelSpec::validate() const {
    if (D < 0 || V <= 0 || K <= 0)
        throw std::runtime_error("ModelSpec: D, V, K must be positive");
    if (lexicon.K() != K)
        throw std::runtime_error("ModelSpec: lexicon topic count " +
                                 std::to_string(lexicon.K()) +
                                 " does not match K = " + std::to_string(K));
    for (const auto& seeds : lexicon.seeds)
        for (int v : seeds)
            if (v < 0 || v >= V)
                throw std::runtime_error("ModelSpec: seed term id out of range");
    const PriorConfig& p = priors;
    if (!(p.a > 0 && p.b > 0 && p.c > 0 && p.d > 0 && p.e > 0 && p.f > 0))
        throw std::runtime_error("ModelSpec: prior parameters must be > 0");
    if (p.c <= p.a)
        std::fprintf(stderr,
                     "warning: seeded shape prior c = %g is not larger than "
                     "neutral shape a = %g; seeds will not be emphasized\n",
                     p.c, p.a);
}

VariationalParams init_variational(const ModelSpec& spec) {
    VariationalParams vp;
    const double theta_rte = spec.D / 1000.0;
    const double beta_rte = 2.0 * spec.D / 1000.0;
    vp.theta_shp = Mat(spec.D, spec.K, 1.0);
    vp.theta_rte = Mat(spec.D, spec.K, theta_rte);
    vp.beta_shp = Mat(spec.K, spec.V, 1.0);
    vp.beta_rte = Mat(spec.K, spec.V, beta_rte);
    const std::size_t s = spec.seed_pairs().size();
    vp.btilde_shp.assign(s, 1.0);
    vp.btilde_rte.assign(s, 1.0);
    return vp;
}

Mat compose_beta(const Mat& beta_star, const std::vector<double>& beta_tilde,
                 const std::vector<std::pair<int, int>>& seed_pairs) {
    if (beta_tilde.size() != seed_pairs.size())
        throw std::runtime_error("compose_beta: beta_tilde size mismatch");
    Mat beta = beta_star;
    for (std::size_t i = 0; i < seed_pairs.size(); ++i)
        beta(seed_pairs[i].first, seed_pairs[i].second) += beta_tilde[i];
    return beta;
}

double log_prior(const Mat& theta, const Mat& beta_star,
                 const std::vector<double>& beta_tilde, const ModelSpec& spec) {
    const PriorConfig& p = spec.priors;
    double sum = 0.0;
    for (double x : theta.data) sum += gamma_logpdf(x, {p.e, p.f});
    for (double x : beta_star.data) sum += gamma_logpdf(x, {p.a, p.b});
    for (double x : beta_tilde) sum += gamma_logpdf(x, {p.c, p.d});
    return sum;
}

SyntheticData generate_synthetic(const ModelSpec& spec, RandomState& rng) {
    spec.validate();
    const PriorConfig& p = spec.priors;
    SyntheticData out;
    out.theta = Mat(spec.D, spec.K);
    for (double& x : out.theta.data) x = gamma_sample({p.e, p.f}, rng);

    Mat beta_star(spec.K, spec.V);
    for (double& x : beta_star.data) x = gamma_sample({p.a, p.b}, rng);
    const auto pairs = spec.seed_pairs();
    std::vector<double> beta_tilde(pairs.size());
    for (double& x : beta_tilde) x = gamma_sample({p.c, p.d}, rng);
    out.beta = compose_beta(beta_star, beta_tilde, pairs);

    out.dtm.D = spec.D;
    out.dtm.V = spec.V;
    out.dtm.rows.resize(spec.D);
    out.dtm.totals.assign(spec.D, 0);
    for (int d = 0; d < spec.D; ++d) {
        out.dtm.doc_ids.push_back("synth" + std::to_string(d));
        auto& row = out.dtm.rows[d];
        for (int v = 0; v < spec.V; ++v) {
            double lambda = 0.0;
            for (int k = 0; k < spec.K; ++k)
                lambda += out.theta(d, k) * out.beta(k, v);
            const auto y = rng.poisson(lambda);
            if (y > 0) {
                row.emplace_back(v, static_cast<int>(y));
                out.dtm.totals[d] += static_cast<long long>(y);
            }
        }
    }
    return out;
}

} // namespace spf
