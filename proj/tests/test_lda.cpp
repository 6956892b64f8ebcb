#include "topicci/lda.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace topicci;

TEST_CASE("K = 1 weights follow the closed form") {
    const auto dtm = make_dtm({{3, 0, 1, 2}, {1, 1, 0, 0}, {0, 2, 5, 1}});
    const double beta = 0.01;
    LdaConfig cfg{1, 1.0, beta, 5, 42};
    const auto model = train(dtm, cfg);
    const std::vector<int> count = {4, 3, 6, 3};
    const double N = 16.0, V = 4.0;
    for (int w = 0; w < 4; ++w)
        CHECK(model.phi(0, w) == doctest::Approx((count[w] + beta) / (N + V * beta)).epsilon(1e-14));

    double expected = 0.0;  // theta degenerates to 1
    for (int w = 0; w < 4; ++w) expected += count[w] * std::log((count[w] + beta) / (N + V * beta));
    CHECK(model.score == doctest::Approx(expected).epsilon(1e-12));
    CHECK(score(model, dtm) == model.score);
}

TEST_CASE("single-word vocabulary forces weight 1 and score 0") {
    const auto one = make_dtm({{1}});
    CHECK(train(one, {1, 1.0, 0.1, 3, 0}).phi(0, 0) == 1.0);
    const auto two = make_dtm({{2}});
    const auto model = train(two, {1, 1.0, 0.1, 3, 0});
    CHECK(model.score == 0.0);
}

TEST_CASE("training is deterministic per seed and seed sensitive") {
    const auto synth = synth_corpus(4, 60, 80, 40, 11);
    const auto cfg = LdaConfig::for_topics(4, 10, 99);
    const auto a = train(synth.dtm, cfg);
    const auto b = train(synth.dtm, cfg);
    CHECK(a.phi == b.phi);
    CHECK(a.score == b.score);
    auto other = cfg;
    other.seed = 100;
    CHECK(train(synth.dtm, other).phi != a.phi);
}

TEST_CASE("phi rows are stochastic and positive") {
    const auto synth = synth_corpus(5, 100, 60, 30, 3);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto m = train(synth.dtm, LdaConfig::for_topics(5, 20, seed));
        CHECK(m.phi.rows() == 5);
        CHECK(m.phi.cols() == 100);
        CHECK((m.phi.array() > 0).all());
        for (Eigen::Index k = 0; k < 5; ++k) CHECK(std::abs(m.phi.row(k).sum() - 1.0) < 1e-9);
        for (Eigen::Index d = 0; d < m.theta.rows(); ++d) CHECK(std::abs(m.theta.row(d).sum() - 1.0) < 1e-9);
    }
}

TEST_CASE("empty documents do not change the score") {
    const std::vector<std::vector<int>> rows = {{2, 1, 0}, {0, 3, 1}, {1, 0, 2}};
    auto padded = rows;
    padded.push_back({0, 0, 0});
    padded.push_back({0, 0, 0});
    const auto cfg = LdaConfig::for_topics(2, 15, 5);
    const auto a = train(make_dtm(rows), cfg);
    const auto b = train(make_dtm(padded), cfg);
    CHECK(a.phi == b.phi);
    CHECK(a.score == b.score);
}

TEST_CASE("train and score errors") {
    CHECK_THROWS_AS(train(make_dtm({{0, 0}, {0, 0}}), LdaConfig::for_topics(2)), std::invalid_argument);
    CHECK_THROWS_AS(train(make_dtm({{1}}), LdaConfig{0, 1.0, 0.1, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(train(make_dtm({{1}}), LdaConfig{1, 0.0, 0.1, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(train(make_dtm({{1}}), LdaConfig{1, 1.0, 0.1, 0, 0}), std::invalid_argument);
    const auto model = train(make_dtm({{1, 2}}), LdaConfig::for_topics(1, 2));
    CHECK_THROWS_AS(score(model, make_dtm({{1, 2, 3}})), DimensionMismatch);
}

TEST_CASE("synthetic corpus: size, determinism and support") {
    const auto s = synth_corpus(5, 200, 500, 60, 1);
    CHECK(s.dtm.total() == 30000);
    CHECK(s.dtm.n_docs() == 500);
    CHECK(s.true_phi.rows() == 5);
    for (Eigen::Index k = 0; k < 5; ++k) CHECK(std::abs(s.true_phi.row(k).sum() - 1.0) < 1e-12);
    const auto again = synth_corpus(5, 200, 500, 60, 1);
    CHECK(dtm_csv(again.dtm) == dtm_csv(s.dtm));

    SynthOptions opts;
    opts.disjoint_support = true;
    const auto halves = synth_corpus(2, 40, 50, 20, 9, opts);
    CHECK((halves.true_phi.block(0, 20, 1, 20).array() == 0).all());
    CHECK((halves.true_phi.block(1, 0, 1, 20).array() == 0).all());
    for (Eigen::Index d = 0; d < halves.dtm.n_docs(); ++d)
        for (CountMatrix::InnerIterator it(halves.dtm.counts, d); it; ++it)
            CHECK((halves.true_phi(0, it.col()) > 0 || halves.true_phi(1, it.col()) > 0));
    CHECK_THROWS(synth_corpus(5, 4, 10, 10, 1));
}

TEST_CASE("synthetic words are distinct lowercase and of varied length") {
    const auto words = synth_words(500);
    std::set<std::string> unique(words.begin(), words.end());
    CHECK(unique.size() == 500);
    std::set<std::size_t> lengths;
    for (const auto& w : words) {
        lengths.insert(w.size());
        for (char c : w) CHECK((c >= 'a' && c <= 'z'));
        CHECK(tokenize(w, default_stopwords()) == std::vector<std::string>{w});
    }
    CHECK(lengths.size() >= 3);
}

TEST_CASE("model text round-trips exactly") {
    const auto synth = synth_corpus(3, 30, 20, 15, 4);
    const auto m = train(synth.dtm, LdaConfig::for_topics(3, 5, 77));
    const auto text = model_text(m);
    CHECK(text.rfind("3 30 77 5 ", 0) == 0);
    const auto back = parse_model(text);
    CHECK(back.phi == m.phi);
    CHECK(back.score == m.score);
    CHECK(back.config.seed == 77);
    CHECK(back.config.n_iterations == 5);
    CHECK(back.theta.size() == 0);
    CHECK_THROWS(parse_model("2 2 1 1 0\n0.5 0.5\n"));
}

TEST_CASE("more sweeps raise the mean score") {
    const auto s = synth_corpus(5, 200, 500, 60, 1);
    double short_mean = 0, long_mean = 0;
    const int n = 50;
    for (int r = 0; r < n; ++r) {
        short_mean += train(s.dtm, LdaConfig::for_topics(5, 10, 1000 + r)).score / n;
        long_mean += train(s.dtm, LdaConfig::for_topics(5, 100, 1000 + r)).score / n;
    }
    CHECK(long_mean >= short_mean);
}
