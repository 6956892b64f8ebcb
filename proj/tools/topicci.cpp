// topicci - word clouds with per-word uncertainty for LDA topics.
#include "topicci/io.hpp"
#include "topicci/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::optional<int> replications;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON pipeline configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
    cmd->add_option("--jobs", o.jobs, "worker threads, 0 = all cores");
    cmd->add_option("--seed", o.seed, "master seed for the replications");
    cmd->add_option("--iterations", o.iterations, "Gibbs sweeps per replication");
    cmd->add_option("--replications", o.replications, "number of replications R");
}

topicci::PipelineConfig resolve(const Overrides& o) {
    auto cfg = topicci::load_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.jobs) cfg.jobs = *o.jobs;
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.iterations) cfg.n_iterations = *o.iterations;
    if (o.replications) cfg.n_replications = *o.replications;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Word clouds with confidence intervals for LDA topics"};
    app.require_subcommand(1);

    Overrides o;
    auto* preprocess = app.add_subcommand("preprocess", "tokenize the corpus and write the document-term matrix");
    auto* ensemble = app.add_subcommand("ensemble", "train the replications (resumable)");
    auto* cloud = app.add_subcommand("cloud", "match topics, aggregate percentiles, lay out and render clouds");
    auto* compare = app.add_subcommand("compare", "black/green/red comparison cloud of two replications");
    auto* scores = app.add_subcommand("scores", "export replication scores as CSV");
    for (auto* cmd : {preprocess, ensemble, cloud, compare, scores}) add_common(cmd, o);

    int rep_a = -1, rep_b = -1, topic = 0;
    compare->add_option("--a", rep_a, "first replication (default: the reference)");
    compare->add_option("--b", rep_b, "second replication")->required();
    compare->add_option("--topic", topic, "reference topic index")->required();

    auto* synth = app.add_subcommand("synth", "write a synthetic LDA corpus, one document per line");
    int k = 5, v = 200, d = 500, len = 60;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    synth->add_option("--topics", k);
    synth->add_option("--terms", v);
    synth->add_option("--docs", d);
    synth->add_option("--doc-len", len);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--output", synth_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            topicci::write_synthetic_corpus(synth_out, k, v, d, len, synth_seed);
            return 0;
        }
        const auto cfg = resolve(o);
        if (preprocess->parsed()) topicci::cmd_preprocess(cfg, std::cout);
        else if (ensemble->parsed()) topicci::cmd_ensemble(cfg, std::cout);
        else if (cloud->parsed()) topicci::cmd_cloud(cfg, std::cout);
        else if (scores->parsed()) topicci::cmd_scores(cfg, std::cout);
        else if (compare->parsed()) {
            if (rep_a < 0) {
                const auto path = cfg.output_dir / "matching.csv";
                if (!std::filesystem::exists(path))
                    throw std::runtime_error("--a omitted and no matching.csv; run `cloud` first");
                rep_a = topicci::parse_matching_csv(topicci::read_file(path), cfg.n_replications, cfg.n_topics)
                            .reference_index;
            }
            topicci::cmd_compare(cfg, rep_a, rep_b, topic, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
