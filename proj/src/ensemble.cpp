#include "topicci/ensemble.hpp"

#include "topicci/io.hpp"
#include "topicci/parallel.hpp"
#include "topicci/rng.hpp"

#include <algorithm>
#include <cmath>

namespace topicci {

ReplicationMode parse_mode(const std::string& name) {
    if (name == "seeds") return ReplicationMode::seeds;
    if (name == "bootstrap") return ReplicationMode::bootstrap;
    if (name == "sweep") return ReplicationMode::sweep;
    throw std::invalid_argument("unknown replication mode '" + name + "'");
}

Metric parse_metric(const std::string& name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "kl") return Metric::kl;
    throw std::invalid_argument("unknown distance metric '" + name + "'");
}

void EnsembleSpec::validate() const {
    if (n_replications < 2) throw std::invalid_argument("an ensemble needs at least 2 replications");
    base_config.validate();
    if (mode == ReplicationMode::sweep &&
        static_cast<int>(sweep_values.size()) != n_replications)
        throw std::invalid_argument("sweep mode needs one override per replication");
    for (int r = 0; r < static_cast<int>(sweep_values.size()) && mode == ReplicationMode::sweep; ++r)
        replication_config(*this, r).validate();
}

LdaConfig replication_config(const EnsembleSpec& spec, int r) {
    LdaConfig cfg = spec.base_config;
    switch (spec.mode) {
        case ReplicationMode::seeds:
        case ReplicationMode::bootstrap:
            cfg.seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(r));
            break;
        case ReplicationMode::sweep: {
            const auto& o = spec.sweep_values.at(static_cast<std::size_t>(r));
            if (o.alpha) cfg.alpha = *o.alpha;
            if (o.beta) cfg.beta = *o.beta;
            if (o.n_iterations) cfg.n_iterations = *o.n_iterations;
            if (o.seed) cfg.seed = *o.seed;
            break;
        }
    }
    return cfg;
}

DocTermMatrix bootstrap_resample(const DocTermMatrix& dtm, std::uint64_t seed) {
    Rng rng(seed);
    const Eigen::Index D = dtm.n_docs();
    std::vector<Eigen::Triplet<int>> triplets;
    for (Eigen::Index d = 0; d < D; ++d) {
        const auto src = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(D)));
        for (CountMatrix::InnerIterator it(dtm.counts, src); it; ++it)
            triplets.emplace_back(static_cast<int>(d), static_cast<int>(it.col()), it.value());
    }
    DocTermMatrix out;
    out.counts.resize(D, dtm.n_terms());
    out.counts.setFromTriplets(triplets.begin(), triplets.end());
    out.counts.makeCompressed();
    return out;
}

TopicModel train_replication(const DocTermMatrix& dtm, const EnsembleSpec& spec, int r) {
    const LdaConfig cfg = replication_config(spec, r);
    try {
        if (spec.mode == ReplicationMode::bootstrap) {
            // Resampling stream is independent of the Gibbs stream.
            const auto sample_seed = derive_seed(~spec.master_seed, static_cast<std::uint64_t>(r));
            return train(bootstrap_resample(dtm, sample_seed), cfg);
        }
        return train(dtm, cfg);
    } catch (const std::exception& e) {
        throw ReplicationError(r, e.what());
    }
}

Ensemble run_ensemble(const DocTermMatrix& dtm, const EnsembleSpec& spec) {
    spec.validate();
    Ensemble ens;
    ens.spec = spec;
    ens.models.resize(static_cast<std::size_t>(spec.n_replications));
    parallel_for(ens.models.size(), spec.jobs, [&](std::size_t r) {
        ens.models[r] = train_replication(dtm, spec, static_cast<int>(r));
    });
    return ens;
}

TopicMatching select_reference(std::span<const TopicModel> models, Metric metric, int jobs) {
    const int R = static_cast<int>(models.size());
    if (R < 2) throw std::invalid_argument("reference selection needs at least 2 replications");
    for (const auto& m : models)
        if (m.phi.rows() != models[0].phi.rows() || m.phi.cols() != models[0].phi.cols())
            throw DimensionMismatch("replications differ in topic count or vocabulary size");

    // Each unordered pair once; cost(b, r) == cost(r, b) under transposition.
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < R; ++a)
        for (int b = a + 1; b < R; ++b) pairs.emplace_back(a, b);
    std::vector<double> pair_cost(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        const auto [a, b] = pairs[p];
        const auto cost = distance_matrix(models[static_cast<std::size_t>(a)].phi,
                                          models[static_cast<std::size_t>(b)].phi, metric);
        pair_cost[p] = hungarian(cost).total_cost;
    });

    TopicMatching out;
    out.losses.assign(static_cast<std::size_t>(R), 0.0);
    // Summed in index order so that equal losses compare equal.
    for (int b = 0; b < R; ++b) {
        double loss = 0.0;
        for (int r = 0; r < R; ++r) {
            if (r == b) continue;
            const int lo = std::min(b, r), hi = std::max(b, r);
            // index of (lo, hi) in the pair list
            const std::size_t p = static_cast<std::size_t>(lo) * (2 * R - lo - 1) / 2 +
                                  static_cast<std::size_t>(hi - lo - 1);
            loss += pair_cost[p];
        }
        out.losses[static_cast<std::size_t>(b)] = loss;
    }
    out.reference_index = static_cast<int>(
        std::min_element(out.losses.begin(), out.losses.end()) - out.losses.begin());

    const auto& ref = models[static_cast<std::size_t>(out.reference_index)].phi;
    out.permutations.resize(static_cast<std::size_t>(R));
    out.pair_costs.resize(static_cast<std::size_t>(R));
    parallel_for(static_cast<std::size_t>(R), jobs, [&](std::size_t r) {
        if (static_cast<int>(r) == out.reference_index) {
            std::vector<int> id(static_cast<std::size_t>(ref.rows()));
            for (std::size_t k = 0; k < id.size(); ++k) id[k] = static_cast<int>(k);
            out.permutations[r] = std::move(id);
            out.pair_costs[r] = 0.0;
            return;
        }
        auto match = hungarian(distance_matrix(ref, models[r].phi, metric));
        out.permutations[r] = std::move(match.permutation);
        out.pair_costs[r] = match.total_cost;
    });
    return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double t = h - static_cast<double>(lo);
    const double v = sorted[lo] + t * (sorted[hi] - sorted[lo]);
    return std::clamp(v, sorted[lo], sorted[hi]);
}

std::vector<PercentileCloud> aggregate_percentiles(std::span<const TopicModel> models,
                                                   const TopicMatching& matching,
                                                   const std::vector<double>& quantile_levels,
                                                   int n_words) {
    if (models.size() != matching.permutations.size())
        throw std::invalid_argument("matching does not belong to this ensemble");
    if (quantile_levels.empty()) throw std::invalid_argument("no quantile levels given");
    for (std::size_t i = 0; i < quantile_levels.size(); ++i) {
        const double q = quantile_levels[i];
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile levels must lie in (0, 1)");
        if (i > 0 && !(q > quantile_levels[i - 1]))
            throw std::invalid_argument("quantile levels must be strictly increasing");
    }
    const auto& ref = models[static_cast<std::size_t>(matching.reference_index)].phi;
    if (n_words < 1 || n_words > ref.cols())
        throw std::invalid_argument("n_words must be between 1 and the vocabulary size");

    std::vector<PercentileCloud> clouds;
    std::vector<double> sample(models.size());
    for (Eigen::Index k = 0; k < ref.rows(); ++k) {
        PercentileCloud cloud;
        cloud.topic_index = static_cast<int>(k);
        cloud.quantile_levels = quantile_levels;
        for (Eigen::Index w : top_words(ref.row(k), n_words)) {
            for (std::size_t r = 0; r < models.size(); ++r)
                sample[r] = models[r].phi(matching.permutations[r][static_cast<std::size_t>(k)], w);
            std::sort(sample.begin(), sample.end());
            WordQuantiles wq;
            wq.word = w;
            wq.ref_weight = ref(k, w);
            wq.min = sample.front();
            wq.max = sample.back();
            for (double q : quantile_levels) wq.values.push_back(quantile_sorted(sample, q));
            cloud.entries.push_back(std::move(wq));
        }
        clouds.push_back(std::move(cloud));
    }
    return clouds;
}

const char* color_name(ColorClass c) {
    switch (c) {
        case ColorClass::black: return "black";
        case ColorClass::green: return "green";
        case ColorClass::red: return "red";
    }
    return "black";
}

std::vector<WordColor> compare_topics(const Eigen::Ref<const Eigen::RowVectorXd>& reference,
                                      const Eigen::Ref<const Eigen::RowVectorXd>& other,
                                      Eigen::Index top_n, double tolerance) {
    if (reference.size() != other.size())
        throw DimensionMismatch("compared topics differ in vocabulary size");
    const auto ref_top = top_words(reference, top_n);
    std::vector<WordColor> out;
    for (Eigen::Index w : top_words(other, top_n)) {
        WordColor wc{w, ColorClass::red};
        if (std::find(ref_top.begin(), ref_top.end(), w) != ref_top.end()) {
            const double rel = std::abs(other[w] - reference[w]) / reference[w];
            wc.color = rel < tolerance ? ColorClass::black : ColorClass::green;
        }
        out.push_back(wc);
    }
    return out;
}

std::string matching_csv(const TopicMatching& matching) {
    std::string out = "replication,reference_topic,matched_topic,pair_cost\n";
    for (std::size_t r = 0; r < matching.permutations.size(); ++r)
        for (std::size_t k = 0; k < matching.permutations[r].size(); ++k)
            out += std::to_string(r) + ',' + std::to_string(k) + ',' +
                   std::to_string(matching.permutations[r][k]) + ',' +
                   format_double(matching.pair_costs[r]) + '\n';
    return out;
}

std::string quantile_column_name(double level) {
    const double pct = level * 100.0;
    const double rounded = std::round(pct);
    if (std::abs(pct - rounded) < 1e-9) return "q" + std::to_string(static_cast<long long>(rounded));
    return "q" + format_double(pct);
}

std::string percentile_csv(const PercentileCloud& cloud, const std::vector<std::string>& terms) {
    std::string out = "word,ref_weight";
    for (double q : cloud.quantile_levels) out += ',' + quantile_column_name(q);
    out += '\n';
    for (const auto& e : cloud.entries) {
        out += terms.at(static_cast<std::size_t>(e.word)) + ',' + format_double(e.ref_weight);
        for (double v : e.values) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

}  // namespace topicci
