#include "topicci/lda.hpp"

#include "topicci/io.hpp"
#include "topicci/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace topicci {

void LdaConfig::validate() const {
    if (n_topics < 1) throw std::invalid_argument("n_topics must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be > 0");
    if (n_iterations < 1) throw std::invalid_argument("n_iterations must be >= 1");
}

TopicModel train(const DocTermMatrix& dtm, const LdaConfig& config) {
    config.validate();
    const int K = config.n_topics;
    const Eigen::Index D = dtm.n_docs();
    const Eigen::Index V = dtm.n_terms();

    // Token stream: (doc, word) in row-major order.
    std::vector<int> tok_doc, tok_word;
    for (Eigen::Index d = 0; d < dtm.counts.outerSize(); ++d)
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it)
            for (int c = 0; c < it.value(); ++c) {
                tok_doc.push_back(static_cast<int>(d));
                tok_word.push_back(static_cast<int>(it.col()));
            }
    if (tok_doc.empty()) throw std::invalid_argument("cannot train on an empty document-term matrix");
    const std::size_t N = tok_doc.size();

    Rng rng(config.seed);
    std::vector<int> z(N);
    std::vector<int> n_dk(static_cast<std::size_t>(D) * K, 0);
    std::vector<int> n_wk(static_cast<std::size_t>(V) * K, 0);
    std::vector<int> n_k(K, 0);
    for (std::size_t i = 0; i < N; ++i) {
        const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
        z[i] = k;
        ++n_dk[static_cast<std::size_t>(tok_doc[i]) * K + k];
        ++n_wk[static_cast<std::size_t>(tok_word[i]) * K + k];
        ++n_k[k];
    }

    const double alpha = config.alpha;
    const double beta = config.beta;
    const double v_beta = static_cast<double>(V) * beta;
    std::vector<double> cum(K);
    for (int sweep = 0; sweep < config.n_iterations; ++sweep) {
        for (std::size_t i = 0; i < N; ++i) {
            int* dk = &n_dk[static_cast<std::size_t>(tok_doc[i]) * K];
            int* wk = &n_wk[static_cast<std::size_t>(tok_word[i]) * K];
            int k = z[i];
            --dk[k];
            --wk[k];
            --n_k[k];
            double total = 0.0;
            for (int t = 0; t < K; ++t) {
                total += (dk[t] + alpha) * (wk[t] + beta) / (n_k[t] + v_beta);
                cum[t] = total;
            }
            const double u = rng.uniform() * total;
            k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
            if (k >= K) k = K - 1;
            z[i] = k;
            ++dk[k];
            ++wk[k];
            ++n_k[k];
        }
    }

    TopicModel model;
    model.config = config;
    model.phi.resize(K, V);
    for (int k = 0; k < K; ++k) {
        const double denom = n_k[k] + v_beta;
        for (Eigen::Index w = 0; w < V; ++w)
            model.phi(k, w) = (n_wk[static_cast<std::size_t>(w) * K + k] + beta) / denom;
    }
    model.theta.resize(D, K);
    const double k_alpha = K * alpha;
    for (Eigen::Index d = 0; d < D; ++d) {
        const int* dk = &n_dk[static_cast<std::size_t>(d) * K];
        const int len = std::accumulate(dk, dk + K, 0);
        for (int k = 0; k < K; ++k) model.theta(d, k) = (dk[k] + alpha) / (len + k_alpha);
    }
    model.score = score(model, dtm);
    return model;
}

double score(const TopicModel& model, const DocTermMatrix& dtm) {
    if (model.phi.cols() != dtm.n_terms())
        throw DimensionMismatch("model vocabulary size differs from the matrix");
    if (model.theta.rows() != dtm.n_docs() || model.theta.cols() != model.phi.rows())
        throw DimensionMismatch("model document proportions do not match the matrix");
    double total = 0.0;
    for (Eigen::Index d = 0; d < dtm.counts.outerSize(); ++d)
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it) {
            const double p = model.theta.row(d).dot(model.phi.col(it.col()));
            total += it.value() * std::log(p);
        }
    return total;
}

namespace {

Eigen::VectorXd dirichlet(Rng& rng, Eigen::Index n, double concentration) {
    Eigen::VectorXd x(n);
    for (;;) {
        for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.gamma(concentration);
        const double s = x.sum();
        if (s > 0.0) return x / s;
    }
}

// Index of the first cumulative entry exceeding u * total.
Eigen::Index draw_from(const std::vector<double>& cum, Rng& rng) {
    const double u = rng.uniform() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return static_cast<Eigen::Index>(it - cum.begin());
}

std::vector<double> cumulative(const Eigen::Ref<const Eigen::RowVectorXd>& p) {
    std::vector<double> cum(static_cast<std::size_t>(p.size()));
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) cum[static_cast<std::size_t>(i)] = (s += p[i]);
    return cum;
}

}  // namespace

SynthCorpus synth_corpus(int n_topics, int n_terms, int n_docs, int doc_len, std::uint64_t seed,
                         const SynthOptions& options) {
    if (n_topics < 1 || n_terms < 1 || n_docs < 1 || doc_len < 1)
        throw std::invalid_argument("synthetic corpus sizes must be >= 1");
    if (n_terms < n_topics) throw std::invalid_argument("synthetic corpus needs V >= K");

    Rng rng(seed);
    SynthCorpus out;
    out.true_phi = Eigen::MatrixXd::Zero(n_topics, n_terms);
    for (int k = 0; k < n_topics; ++k) {
        Eigen::Index lo = 0, hi = n_terms;
        if (options.disjoint_support) {
            lo = static_cast<Eigen::Index>(k) * n_terms / n_topics;
            hi = static_cast<Eigen::Index>(k + 1) * n_terms / n_topics;
        }
        out.true_phi.row(k).segment(lo, hi - lo) =
            dirichlet(rng, hi - lo, options.topic_concentration).transpose();
    }
    std::vector<std::vector<double>> word_cum;
    for (int k = 0; k < n_topics; ++k) word_cum.push_back(cumulative(out.true_phi.row(k)));

    std::vector<Eigen::Triplet<int>> triplets;
    std::vector<int> row(static_cast<std::size_t>(n_terms));
    for (int d = 0; d < n_docs; ++d) {
        const Eigen::VectorXd theta = dirichlet(rng, n_topics, options.doc_concentration);
        const auto topic_cum = cumulative(theta.transpose());
        std::fill(row.begin(), row.end(), 0);
        for (int n = 0; n < doc_len; ++n) {
            const auto k = draw_from(topic_cum, rng);
            const auto w = draw_from(word_cum[static_cast<std::size_t>(k)], rng);
            ++row[static_cast<std::size_t>(w)];
        }
        for (int w = 0; w < n_terms; ++w)
            if (row[static_cast<std::size_t>(w)] > 0)
                triplets.emplace_back(d, w, row[static_cast<std::size_t>(w)]);
    }
    out.dtm.counts.resize(n_docs, n_terms);
    out.dtm.counts.setFromTriplets(triplets.begin(), triplets.end());
    out.dtm.counts.makeCompressed();
    return out;
}

std::vector<std::string> synth_words(int count) {
    static constexpr std::string_view consonants = "bcdfgklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    const auto n_syl = consonants.size() * vowels.size();
    std::vector<std::string> words;
    for (std::size_t i = 0; static_cast<int>(words.size()) < count; ++i) {
        std::string w;
        std::size_t x = i;
        for (int digit = 0; digit < 2 || x > 0; ++digit) {
            const auto s = x % n_syl;
            w += consonants[s / vowels.size()];
            w += vowels[s % vowels.size()];
            x /= n_syl;
        }
        // Vary word length; 'x' and 'y' never occur in the syllable alphabet.
        static constexpr std::string_view tails[] = {"", "x", "yx", "xyx"};
        w += tails[(i * 7) % 4];
        if (default_stopwords().count(w)) continue;
        words.push_back(std::move(w));
    }
    return words;
}

std::string model_text(const TopicModel& model) {
    std::string out = std::to_string(model.n_topics()) + ' ' + std::to_string(model.n_terms()) + ' ' +
                      std::to_string(model.config.seed) + ' ' +
                      std::to_string(model.config.n_iterations) + ' ' + format_double(model.score) +
                      '\n';
    for (Eigen::Index k = 0; k < model.phi.rows(); ++k) {
        for (Eigen::Index w = 0; w < model.phi.cols(); ++w) {
            if (w) out += ' ';
            out += format_double(model.phi(k, w));
        }
        out += '\n';
    }
    return out;
}

namespace {

class Scanner {
public:
    explicit Scanner(std::string_view s) : s_(s) {}

    template <typename T>
    T next() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\n' || s_[pos_] == '\r' ||
                                    s_[pos_] == '\t'))
            ++pos_;
        T value{};
        auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
        if (ec != std::errc{}) throw std::runtime_error("malformed model file");
        pos_ = static_cast<std::size_t>(p - s_.data());
        return value;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

TopicModel parse_model(std::string_view text) {
    Scanner in(text);
    TopicModel model;
    const auto K = in.next<long long>();
    const auto V = in.next<long long>();
    if (K < 1 || V < 1) throw std::runtime_error("malformed model header");
    model.config.n_topics = static_cast<int>(K);
    model.config.alpha = 1.0 / static_cast<double>(K);
    model.config.seed = in.next<std::uint64_t>();
    model.config.n_iterations = in.next<int>();
    model.score = in.next<double>();
    model.phi.resize(K, V);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index w = 0; w < V; ++w) model.phi(k, w) = in.next<double>();
    return model;
}

}  // namespace topicci
