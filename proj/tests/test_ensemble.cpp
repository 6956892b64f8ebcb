#include "topicci/ensemble.hpp"
#include "topicci/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace topicci;

namespace {

TopicModel model_from(const Eigen::MatrixXd& phi) {
    TopicModel m;
    m.phi = phi;
    m.config.n_topics = static_cast<int>(phi.rows());
    return m;
}

Eigen::MatrixXd random_phi(std::mt19937_64& gen, int k, int v) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Eigen::MatrixXd phi(k, v);
    for (int i = 0; i < k * v; ++i) phi.data()[i] = u(gen);
    for (int i = 0; i < k; ++i) phi.row(i) /= phi.row(i).sum();
    return phi;
}

const DocTermMatrix& small_corpus() {
    static const auto s = synth_corpus(4, 60, 80, 40, 21);
    return s.dtm;
}

}  // namespace

TEST_CASE("cosine distance: identity, orthogonality, half overlap") {
    Eigen::MatrixXd a(2, 3), b(2, 3);
    a << 1, 0, 0, 0.5, 0.5, 0;
    b << 0, 1, 0, 0.5, 0, 0.5;
    const auto aa = distance_matrix(a, a);
    CHECK(aa(0, 0) == 0.0);
    CHECK(aa(1, 1) == 0.0);
    const auto ab = distance_matrix(a, b);
    CHECK(ab(0, 0) == doctest::Approx(1.0));
    CHECK(ab(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ab(0, 1) == doctest::Approx(1.0 - oracle::cosine({1, 0, 0}, {0.5, 0, 0.5})));
}

TEST_CASE("distance matrices: transposition symmetry and zero diagonal") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_phi(gen, 6, 40), b = random_phi(gen, 6, 40);
        for (Metric m : {Metric::cosine, Metric::kl}) {
            const auto ab = distance_matrix(a, b, m);
            const auto ba = distance_matrix(b, a, m);
            CHECK(ab == ba.transpose());
            CHECK((ab.array() >= 0).all());
            CHECK(distance_matrix(a, a, m).diagonal().cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("kl distance matches the definition") {
    Eigen::MatrixXd p(1, 3), q(1, 3);
    p << 0.2, 0.3, 0.5;
    q << 0.4, 0.4, 0.2;
    double kl_pq = 0, kl_qp = 0;
    for (int i = 0; i < 3; ++i) {
        kl_pq += p(0, i) * std::log(p(0, i) / q(0, i));
        kl_qp += q(0, i) * std::log(q(0, i) / p(0, i));
    }
    CHECK(distance_matrix(p, q, Metric::kl)(0, 0) == doctest::Approx((kl_pq + kl_qp) / 2).epsilon(1e-14));
    Eigen::MatrixXd z(1, 3);
    z << 0.5, 0.5, 0.0;
    CHECK_THROWS_AS(distance_matrix(p, z, Metric::kl), std::invalid_argument);
    CHECK_THROWS_AS(distance_matrix(p, Eigen::MatrixXd::Ones(1, 4)), DimensionMismatch);
}

TEST_CASE("cosine matching is invariant to positive row scaling") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> s(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_phi(gen, 5, 30), b = random_phi(gen, 5, 30);
        Eigen::MatrixXd scaled = b;
        for (int k = 0; k < 5; ++k) scaled.row(k) *= s(gen);
        CHECK(hungarian(distance_matrix(a, b)).permutation == hungarian(distance_matrix(a, scaled)).permutation);
    }
}

TEST_CASE("select_reference: identical models") {
    std::mt19937_64 gen(1);
    const auto phi = random_phi(gen, 4, 20);
    std::vector<TopicModel> models(5, model_from(phi));
    const auto m = select_reference(models);
    CHECK(m.reference_index == 0);
    for (double l : m.losses) CHECK(l == 0.0);
    for (const auto& p : m.permutations) CHECK(p == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("select_reference: two models tie to index 0") {
    std::mt19937_64 gen(2);
    std::vector<TopicModel> models = {model_from(random_phi(gen, 3, 10)), model_from(random_phi(gen, 3, 10))};
    const auto m = select_reference(models);
    CHECK(m.losses[0] == m.losses[1]);
    CHECK(m.reference_index == 0);
}

TEST_CASE("select_reference matches exhaustive enumeration") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<TopicModel> models;
        for (int r = 0; r < 3; ++r) models.push_back(model_from(random_phi(gen, 4, 12)));
        std::vector<double> loss(3, 0.0);
        for (int b = 0; b < 3; ++b)
            for (int r = 0; r < 3; ++r)
                if (r != b) {
                    Eigen::MatrixXd c(4, 4);
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j) {
                            std::vector<double> x(12), y(12);
                            for (int w = 0; w < 12; ++w) {
                                x[w] = models[b].phi(i, w);
                                y[w] = models[r].phi(j, w);
                            }
                            c(i, j) = 1.0 - oracle::cosine(x, y);
                        }
                    loss[b] += oracle::brute_force_assignment(c).cost;
                }
        const int expect = static_cast<int>(std::min_element(loss.begin(), loss.end()) - loss.begin());
        const auto m = select_reference(models);
        CHECK(m.reference_index == expect);
        for (int b = 0; b < 3; ++b) CHECK(m.losses[b] == doctest::Approx(loss[b]).epsilon(1e-10));
        for (int r = 0; r < 3; ++r) {
            std::set<int> seen(m.permutations[r].begin(), m.permutations[r].end());
            CHECK(seen.size() == 4);
        }
    }
}

TEST_CASE("select_reference is invariant to replication order") {
    const auto& dtm = small_corpus();
    EnsembleSpec spec;
    spec.n_replications = 6;
    spec.base_config = LdaConfig::for_topics(4, 5);
    spec.master_seed = 17;
    const auto ens = run_ensemble(dtm, spec);
    const auto m = select_reference(ens);
    std::vector<TopicModel> reversed(ens.models.rbegin(), ens.models.rend());
    const auto mr = select_reference(reversed);
    CHECK(reversed[static_cast<std::size_t>(mr.reference_index)].phi ==
          ens.models[static_cast<std::size_t>(m.reference_index)].phi);
}

TEST_CASE("run_ensemble: seeds mode determinism and distinct scores") {
    const auto& dtm = small_corpus();
    EnsembleSpec spec;
    spec.n_replications = 8;
    spec.base_config = LdaConfig::for_topics(4, 10);
    spec.master_seed = 3;
    spec.jobs = 2;
    const auto a = run_ensemble(dtm, spec);
    const auto b = run_ensemble(dtm, spec);
    std::set<double> scores;
    for (int r = 0; r < 8; ++r) {
        CHECK(a.models[r].phi == b.models[r].phi);
        CHECK(a.models[r].config.seed == derive_seed(3, static_cast<std::uint64_t>(r)));
        scores.insert(a.models[r].score);
    }
    CHECK(scores.size() == 8);
    // forcing equal seeds gives identical models
    auto same = spec;
    same.mode = ReplicationMode::sweep;
    same.n_replications = 2;
    same.sweep_values = {LdaOverride{{}, {}, {}, 5}, LdaOverride{{}, {}, {}, 5}};
    const auto s = run_ensemble(dtm, same);
    CHECK(s.models[0].phi == s.models[1].phi);
}

TEST_CASE("run_ensemble: bootstrap of a single document") {
    const auto dtm = make_dtm({{3, 1, 2, 0, 1}});
    EnsembleSpec spec;
    spec.mode = ReplicationMode::bootstrap;
    spec.n_replications = 3;
    spec.base_config = LdaConfig::for_topics(2, 5);
    const auto ens = run_ensemble(dtm, spec);
    CHECK(dtm_csv(bootstrap_resample(dtm, 12345)) == dtm_csv(dtm));
    for (int r = 0; r < 3; ++r) {
        auto cfg = replication_config(spec, r);
        CHECK(ens.models[r].phi == train(dtm, cfg).phi);
    }
    CHECK(ens.models[0].phi != ens.models[1].phi);
}

TEST_CASE("run_ensemble: sweep overrides and validation") {
    const auto& dtm = small_corpus();
    EnsembleSpec spec;
    spec.mode = ReplicationMode::sweep;
    spec.n_replications = 2;
    spec.base_config = LdaConfig::for_topics(4, 3);
    spec.sweep_values = {LdaOverride{0.1, {}, 4, {}}, LdaOverride{{}, 0.05, {}, {}}};
    const auto ens = run_ensemble(dtm, spec);
    CHECK(ens.models[0].config.alpha == 0.1);
    CHECK(ens.models[0].config.n_iterations == 4);
    CHECK(ens.models[1].config.beta == 0.05);

    spec.sweep_values.pop_back();
    CHECK_THROWS_AS(run_ensemble(dtm, spec), std::invalid_argument);
    spec.mode = ReplicationMode::seeds;
    spec.n_replications = 1;
    CHECK_THROWS_AS(run_ensemble(dtm, spec), std::invalid_argument);
}

TEST_CASE("run_ensemble reports the failing replication") {
    const auto dtm = make_dtm({{1, 2}, {0, 1}});
    EnsembleSpec spec;
    spec.mode = ReplicationMode::sweep;
    spec.n_replications = 3;
    spec.base_config = LdaConfig::for_topics(2, 2);
    spec.sweep_values = {LdaOverride{}, LdaOverride{}, LdaOverride{}};
    spec.sweep_values[2].n_iterations = 1;
    CHECK_NOTHROW(run_ensemble(dtm, spec));
    const auto empty = make_dtm({{0, 0}, {0, 0}});
    try {
        run_ensemble(empty, spec);
        FAIL("expected failure");
    } catch (const ReplicationError& e) {
        CHECK(e.index() == 0);
    }
}

TEST_CASE("quantile estimator") {
    const std::vector<double> two = {0.1, 0.3};
    CHECK(quantile_sorted(two, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
    const std::vector<double> five = {1, 2, 3, 4, 5};
    CHECK(quantile_sorted(five, 0.1) == doctest::Approx(1.4));
    CHECK(quantile_sorted(five, 0.5) == 3.0);
    CHECK(quantile_sorted(five, 0.9) == doctest::Approx(4.6));
    const std::vector<double> one = {0.7};
    CHECK(quantile_sorted(one, 0.2) == 0.7);
    CHECK_THROWS(quantile_sorted(std::vector<double>{}, 0.5));
}

TEST_CASE("aggregate_percentiles: identical replications have zero spread") {
    std::mt19937_64 gen(6);
    const auto phi = random_phi(gen, 3, 15);
    std::vector<TopicModel> models(4, model_from(phi));
    const auto m = select_reference(models);
    const auto clouds = aggregate_percentiles(models, m, kDefaultQuantileLevels, 5);
    REQUIRE(clouds.size() == 3);
    for (const auto& c : clouds) {
        REQUIRE(c.entries.size() == 5);
        for (std::size_t i = 0; i < c.entries.size(); ++i) {
            for (double v : c.entries[i].values) CHECK(v == c.entries[i].ref_weight);
            if (i > 0) CHECK(c.entries[i - 1].ref_weight >= c.entries[i].ref_weight);
        }
    }
    CHECK_THROWS(aggregate_percentiles(models, m, kDefaultQuantileLevels, 16));
    CHECK_THROWS(aggregate_percentiles(models, m, {0.5, 0.2}, 5));
    CHECK_THROWS(aggregate_percentiles(models, m, {0.0, 0.5}, 5));
}

TEST_CASE("aggregate_percentiles follows the matching permutation") {
    Eigen::MatrixXd a(2, 4), b(2, 4);
    a << 0.7, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.7;
    b << 0.1, 0.1, 0.2, 0.6, 0.5, 0.3, 0.1, 0.1;  // topics swapped, perturbed
    std::vector<TopicModel> models = {model_from(a), model_from(b)};
    const auto m = select_reference(models);
    REQUIRE(m.reference_index == 0);
    CHECK(m.permutations[1] == std::vector<int>{1, 0});
    const auto clouds = aggregate_percentiles(models, m, {0.5}, 1);
    CHECK(clouds[0].entries[0].word == 0);
    CHECK(clouds[0].entries[0].values[0] == doctest::Approx(0.6));
    CHECK(clouds[1].entries[0].word == 3);
    CHECK(clouds[1].entries[0].values[0] == doctest::Approx(0.65));
}

TEST_CASE("property: quantiles are monotone and bounded") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TopicModel> models;
        for (int r = 0; r < 2 + static_cast<int>(gen() % 9); ++r) models.push_back(model_from(random_phi(gen, 3, 25)));
        const auto m = select_reference(models);
        for (const auto& c : aggregate_percentiles(models, m, kDefaultQuantileLevels, 10))
            for (const auto& e : c.entries) {
                CHECK(std::is_sorted(e.values.begin(), e.values.end()));
                CHECK(e.values.front() >= e.min);
                CHECK(e.values.back() <= e.max);
            }
    }
}

TEST_CASE("compare_topics colour rules") {
    Eigen::RowVectorXd ref = Eigen::RowVectorXd::Constant(30, 0.001);
    Eigen::RowVectorXd other = ref;
    for (int w = 0; w < 20; ++w) ref[w] = 0.10;
    other.head(20) = ref.head(20);
    other[0] = 0.11;  // black
    other[1] = 0.20;  // green
    other[2] = 0.0;   // drops out of other's top list
    other[25] = 0.05; // red: outside reference top-20
    const auto classes = compare_topics(ref, other);
    REQUIRE(classes.size() == 20);
    auto cls = [&](Eigen::Index w) {
        for (const auto& c : classes)
            if (c.word == w) return c.color;
        FAIL("word missing");
        return ColorClass::black;
    };
    CHECK(cls(0) == ColorClass::black);
    CHECK(cls(1) == ColorClass::green);
    CHECK(cls(25) == ColorClass::red);
    CHECK(cls(3) == ColorClass::black);
    for (const auto& c : compare_topics(ref, ref)) CHECK(c.color == ColorClass::black);
}

TEST_CASE("csv exports") {
    TopicMatching m;
    m.reference_index = 0;
    m.permutations = {{0, 1}, {1, 0}};
    m.pair_costs = {0.0, 0.25};
    CHECK(matching_csv(m) ==
          "replication,reference_topic,matched_topic,pair_cost\n0,0,0,0\n0,1,1,0\n1,0,1,0.25\n1,1,0,0.25\n");
    PercentileCloud c;
    c.quantile_levels = {0.1, 0.5, 0.025};
    c.entries.push_back({1, 0.5, {0.25, 0.5, 0.75}, 0.25, 0.75});
    CHECK(percentile_csv(c, {"a", "risk"}) == "word,ref_weight,q10,q50,q2.5\nrisk,0.5,0.25,0.5,0.75\n");
}
