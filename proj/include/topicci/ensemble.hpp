// ensemble.hpp - replicated estimation, topic matching against a
// pseudo-benchmark reference, and per-word percentile aggregation.
#pragma once

#include "topicci/hungarian.hpp"
#include "topicci/lda.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace topicci {

enum class ReplicationMode { seeds, bootstrap, sweep };
enum class Metric { cosine, kl };

ReplicationMode parse_mode(const std::string& name);
Metric parse_metric(const std::string& name);

struct LdaOverride {
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<int> n_iterations;
    std::optional<std::uint64_t> seed;
};

struct EnsembleSpec {
    ReplicationMode mode = ReplicationMode::seeds;
    int n_replications = 2;
    LdaConfig base_config;
    std::vector<LdaOverride> sweep_values;
    std::uint64_t master_seed = 0;
    int jobs = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct Ensemble {
    std::vector<TopicModel> models;
    EnsembleSpec spec;
};

/// Raised when replication `index` fails; wraps the underlying message.
class ReplicationError : public std::runtime_error {
public:
    ReplicationError(int index, const std::string& what)
        : std::runtime_error("replication " + std::to_string(index) + " failed: " + what),
          index_(index) {}
    int index() const noexcept { return index_; }

private:
    int index_;
};

/// The LDA configuration replication r trains with.
LdaConfig replication_config(const EnsembleSpec& spec, int r);

/// Same-size with-replacement resample of the documents.
DocTermMatrix bootstrap_resample(const DocTermMatrix& dtm, std::uint64_t seed);

/// Trains replication r alone (used for resumable runs).
TopicModel train_replication(const DocTermMatrix& dtm, const EnsembleSpec& spec, int r);

Ensemble run_ensemble(const DocTermMatrix& dtm, const EnsembleSpec& spec);

// ---- distances -------------------------------------------------------------

/// K x K cost between the topic rows of a and b: 1 - cosine similarity, or
/// the symmetrized Kullback-Leibler divergence.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> distance_matrix(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    Metric metric = Metric::cosine) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("topic matrices differ in shape");
    const Eigen::Index K = a.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cost(K, b.rows());
    if (metric == Metric::cosine) {
        // dot() for norms too, so identical rows give similarity exactly 1
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> na(K), nb(b.rows());
        for (Eigen::Index i = 0; i < K; ++i) na[i] = a.row(i).dot(a.row(i));
        for (Eigen::Index j = 0; j < b.rows(); ++j) nb[j] = b.row(j).dot(b.row(j));
        if ((na.array() <= 0).any() || (nb.array() <= 0).any())
            throw std::invalid_argument("cosine distance of an all-zero topic");
        for (Eigen::Index i = 0; i < K; ++i)
            for (Eigen::Index j = 0; j < b.rows(); ++j) {
                const Scalar sim = a.row(i).dot(b.row(j)) / std::sqrt(na[i] * nb[j]);
                cost(i, j) = std::max(Scalar(0), Scalar(1) - sim);
            }
    } else {
        if ((a.array() <= 0).any() || (b.array() <= 0).any())
            throw std::invalid_argument("KL distance needs strictly positive weights");
        const auto la = a.array().log().matrix().eval();
        const auto lb = b.array().log().matrix().eval();
        for (Eigen::Index i = 0; i < K; ++i)
            for (Eigen::Index j = 0; j < b.rows(); ++j) {
                // (KL(p|q) + KL(q|p)) / 2 = sum (p - q)(log p - log q) / 2
                const Scalar s = ((a.row(i) - b.row(j)).array() * (la.row(i) - lb.row(j)).array()).sum();
                cost(i, j) = std::max(Scalar(0), s / Scalar(2));
            }
    }
    return cost;
}

// ---- matching --------------------------------------------------------------

struct TopicMatching {
    int reference_index = 0;
    std::vector<std::vector<int>> permutations;  // [r][reference topic] -> topic of r
    std::vector<double> pair_costs;              // [r] matching cost to the reference
    std::vector<double> losses;                  // [b] summed cost with b as reference
};

/// Pseudo-benchmark selection: the replication with the smallest summed
/// matching cost to all others (ties -> smallest index).
TopicMatching select_reference(std::span<const TopicModel> models, Metric metric = Metric::cosine,
                               int jobs = 0);

inline TopicMatching select_reference(const Ensemble& ensemble, Metric metric = Metric::cosine) {
    return select_reference(ensemble.models, metric, ensemble.spec.jobs);
}

// ---- percentiles -----------------------------------------------------------

/// Linear interpolation between order statistics at h = (n - 1) q; `sorted`
/// must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

/// Indices of the n largest entries, descending, ties by ascending index.
template <typename Derived>
std::vector<Eigen::Index> top_words(const Eigen::DenseBase<Derived>& weights, Eigen::Index n) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(weights.size()));
    for (Eigen::Index i = 0; i < weights.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    n = std::min(n, weights.size());
    std::partial_sort(idx.begin(), idx.begin() + n, idx.end(), [&](Eigen::Index x, Eigen::Index y) {
        const auto wx = weights(x), wy = weights(y);
        return wx > wy || (wx == wy && x < y);
    });
    idx.resize(static_cast<std::size_t>(n));
    return idx;
}

struct WordQuantiles {
    Eigen::Index word = 0;
    double ref_weight = 0.0;
    std::vector<double> values;  // one per quantile level
    double min = 0.0, max = 0.0; // range of the matched weights
};

struct PercentileCloud {
    int topic_index = 0;
    std::vector<double> quantile_levels;
    std::vector<WordQuantiles> entries;  // descending reference weight
};

inline const std::vector<double> kDefaultQuantileLevels = {0.10, 0.20, 0.50, 0.80, 0.90};

std::vector<PercentileCloud> aggregate_percentiles(std::span<const TopicModel> models,
                                                   const TopicMatching& matching,
                                                   const std::vector<double>& quantile_levels,
                                                   int n_words);

// ---- comparison coloring ---------------------------------------------------

enum class ColorClass { black, green, red };

struct WordColor {
    Eigen::Index word = 0;
    ColorClass color = ColorClass::black;
};

const char* color_name(ColorClass c);

/// Classes for each word of `other`'s top-n list against the reference
/// topic: black (relative difference < 25%), green (>= 25%), red (absent
/// from the reference top-n).
std::vector<WordColor> compare_topics(const Eigen::Ref<const Eigen::RowVectorXd>& reference,
                                      const Eigen::Ref<const Eigen::RowVectorXd>& other,
                                      Eigen::Index top_n = 20, double tolerance = 0.25);

// ---- exports ---------------------------------------------------------------

std::string matching_csv(const TopicMatching& matching);
std::string quantile_column_name(double level);
std::string percentile_csv(const PercentileCloud& cloud, const std::vector<std::string>& terms);

}  // namespace topicci
