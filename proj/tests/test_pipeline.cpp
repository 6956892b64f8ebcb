#include "topicci/io.hpp"
#include "topicci/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

using namespace topicci;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;

    explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("topicci_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        write_synthetic_corpus(dir / "corpus.txt", 3, 60, 40, 50, 9);
    }
    ~Workspace() { fs::remove_all(dir); }

    PipelineConfig config() const {
        PipelineConfig cfg;
        cfg.corpus = dir / "corpus.txt";
        cfg.min_df = 0.0;
        cfg.max_df = 1.0;
        cfg.n_topics = 3;
        cfg.n_iterations = 30;
        cfg.n_replications = 4;
        cfg.n_words = 8;
        cfg.ta_steps = 20000;
        cfg.output_dir = dir / "out";
        cfg.jobs = 1;
        return cfg;
    }
};

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"({"corpus": "c.txt", "n_topics": 5, "mode": "bootstrap",
                                      "sweep": [{"n_iterations": 10}], "quantile_levels": [0.25, 0.75]})",
                                  "/base");
    CHECK(cfg.corpus == fs::path("/base/c.txt"));
    CHECK(cfg.n_topics == 5);
    CHECK(cfg.lda_config().alpha == doctest::Approx(0.2));
    CHECK(cfg.mode == ReplicationMode::bootstrap);
    REQUIRE(cfg.sweep.size() == 1);
    CHECK(*cfg.sweep[0].n_iterations == 10);
    CHECK(cfg.quantile_levels == std::vector<double>{0.25, 0.75});
    CHECK_THROWS_AS(parse_config(R"({"n_topic": 5})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"n_topics": "five"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[1, 2]"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("{"), std::invalid_argument);
}

TEST_CASE("validation runs before anything is written") {
    Workspace ws("validate");
    auto cfg = ws.config();
    cfg.min_df = 0.8;
    cfg.max_df = 0.2;
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_preprocess(cfg, log), std::invalid_argument);
    CHECK(!fs::exists(cfg.output_dir));
    cfg = ws.config();
    cfg.corpus = ws.dir / "missing.txt";
    CHECK_THROWS_AS(cmd_preprocess(cfg, log), std::invalid_argument);
    CHECK(!fs::exists(cfg.output_dir));
}

TEST_CASE("end to end on a small synthetic corpus") {
    Workspace ws("e2e");
    auto cfg = ws.config();
    std::ostringstream log;

    cmd_preprocess(cfg, log);
    const auto data = load_corpus_data(cfg.output_dir);
    CHECK(data.dtm.n_docs() == 40);
    CHECK(data.dtm.total() == 40 * 50);
    CHECK(data.doc_ids.size() == 40);

    CHECK(cmd_ensemble(cfg, log) == 4);
    CHECK(fs::exists(model_path(cfg.output_dir, 3)));
    CHECK(cmd_ensemble(cfg, log) == 0);

    SUBCASE("resuming extends the ensemble without retraining") {
        const auto before = read_file(model_path(cfg.output_dir, 0));
        cfg.n_replications = 6;
        CHECK(cmd_ensemble(cfg, log) == 2);
        CHECK(read_file(model_path(cfg.output_dir, 0)) == before);
        const auto scores = read_file(cfg.output_dir / "scores.csv");
        CHECK(std::count(scores.begin(), scores.end(), '\n') == 7);
    }

    SUBCASE("stale model files are reported") {
        cfg.n_iterations = 31;
        CHECK_THROWS_AS(cmd_ensemble(cfg, log), std::runtime_error);
    }

    SUBCASE("missing model file is named") {
        fs::remove(model_path(cfg.output_dir, 2));
        try {
            cmd_cloud(cfg, log);
            FAIL("expected an error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("model_0002.txt") != std::string::npos);
        }
    }

    SUBCASE("clouds, comparison and determinism") {
        cmd_cloud(cfg, log);
        for (int k = 0; k < 3; ++k) {
            const auto stem = "topic_0" + std::to_string(k);
            CHECK(fs::exists(cfg.output_dir / "clouds" / (stem + ".svg")));
            CHECK(fs::exists(cfg.output_dir / "percentiles" / (stem + ".csv")));
            CHECK(fs::exists(cfg.output_dir / "layouts" / (stem + ".csv")));
        }
        CHECK(fs::exists(cfg.output_dir / "matching.csv"));
        const auto svg = read_file(cfg.output_dir / "clouds" / "topic_00.svg");
        cmd_cloud(cfg, log);
        CHECK(read_file(cfg.output_dir / "clouds" / "topic_00.svg") == svg);

        std::ostringstream clog;
        const auto self = cmd_compare(cfg, 1, 1, 0, clog);
        CHECK(fs::exists(self));
        CHECK(clog.str().find("black=8 green=0 red=0") != std::string::npos);
        const auto other = read_file(cmd_compare(cfg, 0, 2, 1, log));
        CHECK(other.find("<svg ") != std::string::npos);

        CHECK_THROWS_AS(cmd_compare(cfg, 0, 1, 99, log), std::invalid_argument);
        CHECK_THROWS_AS(cmd_compare(cfg, 0, 9, 0, log), std::invalid_argument);
    }

    SUBCASE("scores are rewritten from the model files") {
        fs::remove(cfg.output_dir / "scores.csv");
        cmd_scores(cfg, log);
        const auto scores = read_file(cfg.output_dir / "scores.csv");
        CHECK(scores.rfind("replication,seed,n_iterations,score\n", 0) == 0);
        CHECK(std::count(scores.begin(), scores.end(), '\n') == 5);
    }
}

TEST_CASE("bundled example config parses") {
    const auto cfg = load_config(fs::path(TOPICCI_DATA_DIR) / "example.json");
    CHECK(fs::exists(cfg.corpus));
    CHECK(cfg.n_topics >= 1);
}
