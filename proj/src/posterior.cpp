#include "spf/posterior.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace spf {

FittedModel posterior_means(const VariationalParams& params, const ModelSpec& spec,
                            const DocTermMatrix& dtm, const Vocabulary& vocab,
                            bool length_normalized) {
    if (vocab.size() != spec.V)
        throw std::runtime_error("posterior_means: vocabulary size mismatch");
    FittedModel m;
    m.vocabulary = vocab;
    m.lexicon = spec.lexicon;

    m.theta_hat = Mat(spec.D, spec.K);
    for (int d = 0; d < spec.D; ++d) {
        const double nd = length_normalized && dtm.totals[d] > 0
                              ? static_cast<double>(dtm.totals[d])
                              : 1.0;
        for (int k = 0; k < spec.K; ++k)
            m.theta_hat(d, k) = params.theta_shp(d, k) / (nd * params.theta_rte(d, k));
    }

    m.beta_star_hat = Mat(spec.K, spec.V);
    for (int k = 0; k < spec.K; ++k)
        for (int v = 0; v < spec.V; ++v)
            m.beta_star_hat(k, v) = params.beta_shp(k, v) / params.beta_rte(k, v);
    m.beta_tilde_hat = Mat(spec.K, spec.V, 0.0);
    const auto pairs = spec.seed_pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i)
        m.beta_tilde_hat(pairs[i].first, pairs[i].second) =
            params.btilde_shp[i] / params.btilde_rte[i];
    m.beta_hat = m.beta_star_hat;
    for (auto [k, v] : pairs) m.beta_hat(k, v) += m.beta_tilde_hat(k, v);
    return m;
}

std::vector<RankedTerm> top_terms(const FittedModel& model, int k, int n,
                                  const std::vector<std::string>& drop) {
    const int K = model.beta_hat.rows;
    const int V = model.beta_hat.cols;
    if (k < 0 || k >= K) throw std::runtime_error("top_terms: topic index out of range");
    std::unordered_set<std::string> dropped(drop.begin(), drop.end());
    std::unordered_set<int> seed_set;
    if (k < model.lexicon.K())
        seed_set.insert(model.lexicon.seeds[k].begin(), model.lexicon.seeds[k].end());

    std::vector<int> order;
    order.reserve(V);
    for (int v = 0; v < V; ++v)
        if (!dropped.count(model.vocabulary.terms[v])) order.push_back(v);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
        return model.beta_hat(k, l) > model.beta_hat(k, r);
    });
    if (n < static_cast<int>(order.size())) order.resize(n);

    std::vector<RankedTerm> out;
    out.reserve(order.size());
    for (int v : order)
        out.push_back({model.vocabulary.terms[v], model.beta_hat(k, v),
                       seed_set.count(v) > 0});
    return out;
}

std::vector<Assignment> classify(const FittedModel& model,
                                 const std::vector<std::string>& doc_ids) {
    const int D = model.theta_hat.rows;
    const int K = model.theta_hat.cols;
    if (static_cast<int>(doc_ids.size()) != D)
        throw std::runtime_error("classify: doc_ids size mismatch");
    std::vector<Assignment> out;
    out.reserve(D);
    for (int d = 0; d < D; ++d) {
        int best = 0;
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            total += model.theta_hat(d, k);
            if (model.theta_hat(d, k) > model.theta_hat(d, best)) best = k;
        }
        out.push_back({doc_ids[d], best, model.theta_hat(d, best) / total});
    }
    return out;
}

Mat score_new_documents(const VariationalParams& trained, const ModelSpec& spec,
                        const DocTermMatrix& new_dtm, const TrainConfig& cfg,
                        bool length_normalized) {
    if (new_dtm.V != spec.V)
        throw std::runtime_error("score_new_documents: vocabulary mismatch");

    ModelSpec fold_spec = spec;
    fold_spec.D = new_dtm.D;

    VariationalParams init = init_variational(fold_spec);
    // Keep the training-time initialization scale for theta.
    const double theta_rte0 = spec.D > 0 ? spec.D / 1000.0 : 1.0;
    std::fill(init.theta_rte.data.begin(), init.theta_rte.data.end(), theta_rte0);
    init.beta_shp = trained.beta_shp;
    init.beta_rte = trained.beta_rte;
    init.btilde_shp = trained.btilde_shp;
    init.btilde_rte = trained.btilde_rte;

    FitResult fit = train(new_dtm, fold_spec, cfg, init, /*update_globals=*/false);
    Mat theta_hat(new_dtm.D, fold_spec.K);
    for (int d = 0; d < new_dtm.D; ++d) {
        const double nd = length_normalized && new_dtm.totals[d] > 0
                              ? static_cast<double>(new_dtm.totals[d])
                              : 1.0;
        for (int k = 0; k < fold_spec.K; ++k)
            theta_hat(d, k) =
                fit.params.theta_shp(d, k) / (nd * fit.params.theta_rte(d, k));
    }
    return theta_hat;
}

} // namespace spf
