// lda.hpp - collapsed Gibbs LDA, its fit score, and a synthetic LDA corpus.
#pragma once

#include "topicci/corpus.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>

namespace topicci {

struct LdaConfig {
    int n_topics = 20;
    double alpha = 1.0 / 20;  // symmetric document-topic prior
    double beta = 0.01;       // symmetric topic-word prior
    int n_iterations = 100;   // full Gibbs sweeps
    std::uint64_t seed = 0;

    /// Defaults for K topics: alpha = 1/K, beta = 0.01.
    static LdaConfig for_topics(int k, int n_iterations = 100, std::uint64_t seed = 0) {
        return {k, 1.0 / k, 0.01, n_iterations, seed};
    }

    void validate() const;
};

struct TopicModel {
    Eigen::MatrixXd phi;    // K x V, rows sum to 1
    Eigen::MatrixXd theta;  // D x K from the final sweep; empty for models read from disk
    double score = 0.0;
    LdaConfig config;

    Eigen::Index n_topics() const noexcept { return phi.rows(); }
    Eigen::Index n_terms() const noexcept { return phi.cols(); }
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Collapsed Gibbs sampling for config.n_iterations sweeps from a seeded
/// uniform topic assignment. Deterministic in (dtm, config).
TopicModel train(const DocTermMatrix& dtm, const LdaConfig& config);

/// sum_d sum_w n_dw * log(sum_k theta_dk * phi_kw).
double score(const TopicModel& model, const DocTermMatrix& dtm);

struct SynthOptions {
    double topic_concentration = 0.05;  // Dirichlet parameter of each topic over V
    double doc_concentration = 0.2;     // Dirichlet parameter of each document over K
    bool disjoint_support = false;      // topic k lives on the k-th contiguous block of V
};

struct SynthCorpus {
    DocTermMatrix dtm;
    Eigen::MatrixXd true_phi;  // K x V
};

SynthCorpus synth_corpus(int n_topics, int n_terms, int n_docs, int doc_len, std::uint64_t seed,
                         const SynthOptions& options = {});

/// Distinct lowercase pseudo-words usable as synthetic vocabulary.
std::vector<std::string> synth_words(int count);

/// Header `K V seed n_iterations score`, then K rows of V weights.
std::string model_text(const TopicModel& model);
TopicModel parse_model(std::string_view text);

}  // namespace topicci
