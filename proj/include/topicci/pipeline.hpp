// pipeline.hpp - the end-to-end stages behind the command-line tool.
//
// Output directory layout:
//   vocabulary.txt, documents.txt, dtm.csv        preprocess
//   models/model_NNNN.txt, scores.csv              ensemble
//   matching.csv, percentiles/, layouts/, clouds/  cloud
//   compare/                                       compare
#pragma once

#include "topicci/corpus.hpp"
#include "topicci/ensemble.hpp"
#include "topicci/layout.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace topicci {

struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path stopwords;  // empty = bundled list
    double min_df = 0.005;
    double max_df = 0.75;

    int n_topics = 20;
    std::optional<double> alpha;  // default 1 / n_topics
    double beta = 0.01;
    int n_iterations = 100;

    ReplicationMode mode = ReplicationMode::seeds;
    int n_replications = 1000;
    std::uint64_t master_seed = 1;
    std::vector<LdaOverride> sweep;
    Metric metric = Metric::cosine;

    std::vector<double> quantile_levels = kDefaultQuantileLevels;
    int n_words = 20;

    double canvas_side = 1000.0;
    double fill_ratio = 0.30;
    double min_render_size = kMinRenderSize;
    long ta_steps = 1'000'000;
    std::uint64_t ta_seed = 7;

    std::filesystem::path output_dir = "out";
    int jobs = 0;

    LdaConfig lda_config() const;
    EnsembleSpec ensemble_spec() const;
};

/// Parses the JSON config; relative paths resolve against the file's
/// directory. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

enum class Stage { preprocess, ensemble, scores, cloud, compare };

/// Checks everything `stage` reads before any output is written.
void validate_config(const PipelineConfig& cfg, Stage stage);

struct CorpusData {
    Vocabulary vocab;
    std::vector<std::string> doc_ids;
    DocTermMatrix dtm;
};

CorpusData load_corpus_data(const std::filesystem::path& out_dir);
std::filesystem::path model_path(const std::filesystem::path& out_dir, int r);
std::vector<TopicModel> load_models(const PipelineConfig& cfg);
TopicMatching parse_matching_csv(const std::string& text, int n_replications, int n_topics);

void cmd_preprocess(const PipelineConfig& cfg, std::ostream& log);
/// Returns the number of replications trained (existing files are kept).
int cmd_ensemble(const PipelineConfig& cfg, std::ostream& log);
void cmd_scores(const PipelineConfig& cfg, std::ostream& log);
void cmd_cloud(const PipelineConfig& cfg, std::ostream& log);
/// Returns the path of the written comparison SVG.
std::filesystem::path cmd_compare(const PipelineConfig& cfg, int replication_a, int replication_b, int topic,
                                  std::ostream& log);

/// Writes a synthetic LDA corpus as one document per line.
void write_synthetic_corpus(const std::filesystem::path& path, int n_topics, int n_terms, int n_docs,
                            int doc_len, std::uint64_t seed);

}  // namespace topicci
