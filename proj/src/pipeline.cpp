#include "topicci/pipeline.hpp"

#include "topicci/geometry.hpp"
#include "topicci/io.hpp"
#include "topicci/parallel.hpp"
#include "topicci/render.hpp"
#include "topicci/rng.hpp"

#include <json.hpp>

#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace topicci {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string topic_stem(int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "topic_%02d", k);
    return buf;
}

template <typename T>
T get_as(const json& j, const char* key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace

LdaConfig PipelineConfig::lda_config() const {
    LdaConfig cfg = LdaConfig::for_topics(n_topics, n_iterations);
    if (alpha) cfg.alpha = *alpha;
    cfg.beta = beta;
    return cfg;
}

EnsembleSpec PipelineConfig::ensemble_spec() const {
    EnsembleSpec spec;
    spec.mode = mode;
    spec.n_replications = n_replications;
    spec.base_config = lda_config();
    spec.sweep_values = sweep;
    spec.master_seed = master_seed;
    spec.jobs = jobs;
    return spec;
}

PipelineConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

    auto resolve = [&](const std::string& p) -> fs::path {
        if (p.empty()) return {};
        fs::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };

    PipelineConfig cfg;
    for (const auto& [key, v] : j.items()) {
        const char* k = key.c_str();
        if (key == "corpus") cfg.corpus = resolve(get_as<std::string>(v, k));
        else if (key == "stopwords") cfg.stopwords = resolve(get_as<std::string>(v, k));
        else if (key == "min_df") cfg.min_df = get_as<double>(v, k);
        else if (key == "max_df") cfg.max_df = get_as<double>(v, k);
        else if (key == "n_topics") cfg.n_topics = get_as<int>(v, k);
        else if (key == "alpha") cfg.alpha = v.is_null() ? std::nullopt : std::optional(get_as<double>(v, k));
        else if (key == "beta") cfg.beta = get_as<double>(v, k);
        else if (key == "n_iterations") cfg.n_iterations = get_as<int>(v, k);
        else if (key == "mode") cfg.mode = parse_mode(get_as<std::string>(v, k));
        else if (key == "n_replications") cfg.n_replications = get_as<int>(v, k);
        else if (key == "master_seed") cfg.master_seed = get_as<std::uint64_t>(v, k);
        else if (key == "metric") cfg.metric = parse_metric(get_as<std::string>(v, k));
        else if (key == "quantile_levels") cfg.quantile_levels = get_as<std::vector<double>>(v, k);
        else if (key == "n_words") cfg.n_words = get_as<int>(v, k);
        else if (key == "canvas_side") cfg.canvas_side = get_as<double>(v, k);
        else if (key == "fill_ratio") cfg.fill_ratio = get_as<double>(v, k);
        else if (key == "min_render_size") cfg.min_render_size = get_as<double>(v, k);
        else if (key == "ta_steps") cfg.ta_steps = get_as<long>(v, k);
        else if (key == "ta_seed") cfg.ta_seed = get_as<std::uint64_t>(v, k);
        else if (key == "output_dir") cfg.output_dir = resolve(get_as<std::string>(v, k));
        else if (key == "jobs") cfg.jobs = get_as<int>(v, k);
        else if (key == "sweep") {
            if (!v.is_array()) throw std::invalid_argument("config key 'sweep' must be an array");
            for (const auto& item : v) {
                LdaOverride o;
                for (const auto& [sk, sv] : item.items()) {
                    if (sk == "alpha") o.alpha = get_as<double>(sv, "sweep.alpha");
                    else if (sk == "beta") o.beta = get_as<double>(sv, "sweep.beta");
                    else if (sk == "n_iterations") o.n_iterations = get_as<int>(sv, "sweep.n_iterations");
                    else if (sk == "seed") o.seed = get_as<std::uint64_t>(sv, "sweep.seed");
                    else throw std::invalid_argument("unknown sweep key '" + sk + "'");
                }
                cfg.sweep.push_back(o);
            }
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw std::invalid_argument("config file not found: " + path.string());
    return parse_config(read_file(path), path.parent_path());
}

void validate_config(const PipelineConfig& cfg, Stage stage) {
    if (!(cfg.min_df >= 0.0 && cfg.min_df < cfg.max_df && cfg.max_df <= 1.0))
        throw std::invalid_argument("config: need 0 <= min_df < max_df <= 1");
    cfg.ensemble_spec().validate();
    if (cfg.n_words < 1) throw std::invalid_argument("config: n_words must be >= 1");
    if (cfg.quantile_levels.empty()) throw std::invalid_argument("config: quantile_levels is empty");
    for (std::size_t i = 0; i < cfg.quantile_levels.size(); ++i) {
        const double q = cfg.quantile_levels[i];
        if (!(q > 0.0 && q < 1.0) || (i > 0 && !(q > cfg.quantile_levels[i - 1])))
            throw std::invalid_argument("config: quantile_levels must be strictly increasing in (0, 1)");
    }
    if (!(cfg.canvas_side > 0.0)) throw std::invalid_argument("config: canvas_side must be positive");
    if (!(cfg.fill_ratio > 0.0 && cfg.fill_ratio <= 1.0))
        throw std::invalid_argument("config: fill_ratio must lie in (0, 1]");
    if (!(cfg.min_render_size >= 0.0)) throw std::invalid_argument("config: min_render_size must be >= 0");
    if (cfg.ta_steps < 0) throw std::invalid_argument("config: ta_steps must be >= 0");
    if (cfg.jobs < 0) throw std::invalid_argument("config: jobs must be >= 0");
    if (cfg.output_dir.empty()) throw std::invalid_argument("config: output_dir is empty");

    auto require = [](const fs::path& p, const char* what) {
        if (!fs::exists(p)) throw std::invalid_argument(std::string(what) + " not found: " + p.string());
    };
    switch (stage) {
        case Stage::preprocess:
            if (cfg.corpus.empty()) throw std::invalid_argument("config: corpus path missing");
            require(cfg.corpus, "corpus");
            if (!cfg.stopwords.empty()) require(cfg.stopwords, "stopword list");
            break;
        case Stage::ensemble:
            for (const char* f : {"vocabulary.txt", "documents.txt", "dtm.csv"})
                require(cfg.output_dir / f, "preprocess output (run `preprocess` first)");
            break;
        case Stage::scores:
        case Stage::cloud:
        case Stage::compare:
            require(cfg.output_dir / "vocabulary.txt", "preprocess output (run `preprocess` first)");
            require(cfg.output_dir / "models", "model directory (run `ensemble` first)");
            break;
    }
}

CorpusData load_corpus_data(const fs::path& out_dir) {
    CorpusData data;
    data.vocab = read_vocabulary(out_dir / "vocabulary.txt");
    std::istringstream ids(read_file(out_dir / "documents.txt"));
    for (std::string line; std::getline(ids, line);) data.doc_ids.push_back(line);
    data.dtm = read_dtm_csv(out_dir / "dtm.csv", static_cast<Eigen::Index>(data.doc_ids.size()),
                            static_cast<Eigen::Index>(data.vocab.size()));
    return data;
}

fs::path model_path(const fs::path& out_dir, int r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "model_%04d.txt", r);
    return out_dir / "models" / buf;
}

std::vector<TopicModel> load_models(const PipelineConfig& cfg) {
    std::vector<TopicModel> models;
    for (int r = 0; r < cfg.n_replications; ++r) {
        const auto path = model_path(cfg.output_dir, r);
        if (!fs::exists(path)) throw std::runtime_error("missing model file " + path.string());
        TopicModel m;
        try {
            m = parse_model(read_file(path));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ": " + e.what());
        }
        if (!models.empty() && (m.phi.rows() != models[0].phi.rows() || m.phi.cols() != models[0].phi.cols()))
            throw std::runtime_error("inconsistent model dimensions in " + path.string());
        models.push_back(std::move(m));
    }
    return models;
}

TopicMatching parse_matching_csv(const std::string& text, int n_replications, int n_topics) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "replication,reference_topic,matched_topic,pair_cost")
        throw std::runtime_error("matching.csv: bad header");
    TopicMatching m;
    m.permutations.assign(static_cast<std::size_t>(n_replications),
                          std::vector<int>(static_cast<std::size_t>(n_topics), -1));
    m.pair_costs.assign(static_cast<std::size_t>(n_replications), 0.0);
    m.reference_index = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c, d;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        std::getline(row, d);
        const int r = std::stoi(a), k = std::stoi(b), t = std::stoi(c);
        if (r < 0 || r >= n_replications || k < 0 || k >= n_topics || t < 0 || t >= n_topics)
            throw std::runtime_error("matching.csv: entry out of range");
        m.permutations[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = t;
        m.pair_costs[static_cast<std::size_t>(r)] = std::stod(d);
    }
    for (int r = 0; r < n_replications; ++r) {
        const auto& p = m.permutations[static_cast<std::size_t>(r)];
        if (std::set<int>(p.begin(), p.end()).size() != p.size() || p.front() < 0)
            throw std::runtime_error("matching.csv: replication " + std::to_string(r) + " is not a permutation");
        if (m.pair_costs[static_cast<std::size_t>(r)] == 0.0 && m.reference_index < 0) {
            bool identity = true;
            for (int k = 0; k < n_topics; ++k) identity &= p[static_cast<std::size_t>(k)] == k;
            if (identity) m.reference_index = r;
        }
    }
    if (m.reference_index < 0) m.reference_index = 0;
    return m;
}

void cmd_preprocess(const PipelineConfig& cfg, std::ostream& log) {
    validate_config(cfg, Stage::preprocess);
    auto docs = read_corpus(cfg.corpus);
    const StopwordSet stop = cfg.stopwords.empty() ? default_stopwords() : read_stopwords(cfg.stopwords);
    tokenize_all(docs, stop);
    const Vocabulary vocab = build_vocabulary(docs, cfg.min_df, cfg.max_df);
    const DocTermMatrix dtm = vectorize(docs, vocab);

    std::string ids;
    for (const auto& d : docs) ids += d.id + '\n';
    write_file(cfg.output_dir / "vocabulary.txt", vocabulary_text(vocab));
    write_file(cfg.output_dir / "documents.txt", ids);
    write_file(cfg.output_dir / "dtm.csv", dtm_csv(dtm));
    log << "D=" << dtm.n_docs() << " V=" << dtm.n_terms() << " tokens=" << dtm.total() << '\n';
}

int cmd_ensemble(const PipelineConfig& cfg, std::ostream& log) {
    validate_config(cfg, Stage::ensemble);
    const auto data = load_corpus_data(cfg.output_dir);
    const EnsembleSpec spec = cfg.ensemble_spec();

    std::vector<int> todo;
    for (int r = 0; r < spec.n_replications; ++r) {
        const auto path = model_path(cfg.output_dir, r);
        if (!fs::exists(path)) {
            todo.push_back(r);
            continue;
        }
        const auto existing = parse_model(read_file(path));
        const auto expect = replication_config(spec, r);
        if (existing.config.seed != expect.seed || existing.config.n_iterations != expect.n_iterations ||
            existing.phi.rows() != expect.n_topics || existing.phi.cols() != data.dtm.n_terms())
            throw std::runtime_error("stale model file " + path.string() +
                                     " does not match the configuration; remove it or change output_dir");
    }
    parallel_for(todo.size(), spec.jobs, [&](std::size_t i) {
        const int r = todo[i];
        write_file(model_path(cfg.output_dir, r), model_text(train_replication(data.dtm, spec, r)));
    });
    const auto models = load_models(cfg);
    write_file(cfg.output_dir / "scores.csv", export_scores(models));
    log << "trained " << todo.size() << " of " << spec.n_replications << " replications\n";
    return static_cast<int>(todo.size());
}

void cmd_scores(const PipelineConfig& cfg, std::ostream& log) {
    validate_config(cfg, Stage::scores);
    const auto models = load_models(cfg);
    write_file(cfg.output_dir / "scores.csv", export_scores(models));
    log << "wrote scores for " << models.size() << " replications\n";
}

void cmd_cloud(const PipelineConfig& cfg, std::ostream& log) {
    validate_config(cfg, Stage::cloud);
    const auto vocab = read_vocabulary(cfg.output_dir / "vocabulary.txt");
    const auto models = load_models(cfg);
    if (models.front().phi.cols() != static_cast<Eigen::Index>(vocab.size()))
        throw std::runtime_error("model vocabulary size differs from vocabulary.txt");
    if (cfg.n_words > static_cast<int>(vocab.size()))
        throw std::invalid_argument("config: n_words exceeds the vocabulary size");

    const auto matching = select_reference(models, cfg.metric, cfg.jobs);
    const auto clouds = aggregate_percentiles(models, matching, cfg.quantile_levels, cfg.n_words);

    std::vector<std::vector<std::pair<std::string, double>>> outer(clouds.size());
    for (std::size_t k = 0; k < clouds.size(); ++k)
        for (const auto& e : clouds[k].entries)
            outer[k].emplace_back(vocab.terms[static_cast<std::size_t>(e.word)], e.values.back());
    const double scale = calibrate_scale(outer, cfg.canvas_side, cfg.fill_ratio);
    const Palette palette = Palette::ramp(cfg.quantile_levels.size());

    struct TopicOutput {
        std::string svg, layout;
        bool feasible = false;
    };
    std::vector<TopicOutput> results(clouds.size());
    parallel_for(clouds.size(), cfg.jobs, [&](std::size_t k) {
        std::vector<GlyphStack> stacks;
        std::vector<double> weights;
        for (const auto& e : clouds[k].entries) {
            auto stack = build_stack(vocab.terms[static_cast<std::size_t>(e.word)], cfg.quantile_levels, e.values,
                                     scale, cfg.min_render_size);
            if (stack.empty()) continue;
            stacks.push_back(std::move(stack));
            weights.push_back(e.ref_weight);
        }
        if (stacks.empty()) throw std::runtime_error("topic " + std::to_string(k) + ": every word was pruned");
        TaSchedule schedule;
        schedule.n_steps = cfg.ta_steps;
        schedule.seed = derive_seed(cfg.ta_seed, k);
        const auto laid = optimize(stacks, weights, cfg.canvas_side, schedule);
        results[k] = {render_cloud(stacks, laid.state, palette), layout_csv(stacks, laid.state), laid.feasible};
    });

    write_file(cfg.output_dir / "matching.csv", matching_csv(matching));
    for (std::size_t k = 0; k < clouds.size(); ++k) {
        const auto stem = topic_stem(static_cast<int>(k));
        write_file(cfg.output_dir / "percentiles" / (stem + ".csv"), percentile_csv(clouds[k], vocab.terms));
        write_file(cfg.output_dir / "layouts" / (stem + ".csv"), results[k].layout);
        write_file(cfg.output_dir / "clouds" / (stem + ".svg"), results[k].svg);
        if (!results[k].feasible) log << "warning: " << stem << " layout has overlaps or leaves the canvas\n";
    }
    log << "reference replication " << matching.reference_index << ", " << clouds.size() << " clouds\n";
}

fs::path cmd_compare(const PipelineConfig& cfg, int replication_a, int replication_b, int topic,
                     std::ostream& log) {
    validate_config(cfg, Stage::compare);
    if (replication_a < 0 || replication_a >= cfg.n_replications || replication_b < 0 ||
        replication_b >= cfg.n_replications)
        throw std::invalid_argument("replication index out of range");
    if (topic < 0 || topic >= cfg.n_topics)
        throw std::invalid_argument("topic " + std::to_string(topic) + " out of range (K = " +
                                    std::to_string(cfg.n_topics) + ")");
    const auto vocab = read_vocabulary(cfg.output_dir / "vocabulary.txt");
    const auto models = load_models(cfg);
    const auto matching_file = cfg.output_dir / "matching.csv";
    const TopicMatching matching =
        fs::exists(matching_file)
            ? parse_matching_csv(read_file(matching_file), cfg.n_replications, cfg.n_topics)
            : select_reference(models, cfg.metric, cfg.jobs);

    const auto ta = matching.permutations[static_cast<std::size_t>(replication_a)][static_cast<std::size_t>(topic)];
    const auto tb = matching.permutations[static_cast<std::size_t>(replication_b)][static_cast<std::size_t>(topic)];
    const Eigen::RowVectorXd ref = models[static_cast<std::size_t>(replication_a)].phi.row(ta);
    const Eigen::RowVectorXd other = models[static_cast<std::size_t>(replication_b)].phi.row(tb);
    const auto colors = compare_topics(ref, other, cfg.n_words);

    std::vector<std::pair<std::string, double>> words;
    std::map<std::string, ColorClass> classes;
    for (const auto& wc : colors) {
        const auto& term = vocab.terms.at(static_cast<std::size_t>(wc.word));
        words.emplace_back(term, other[wc.word]);
        classes[term] = wc.color;
    }
    const double scale = calibrate_scale(std::span(&words, 1), cfg.canvas_side, cfg.fill_ratio);
    std::vector<GlyphStack> stacks;
    std::vector<double> weights;
    const double level[] = {0.5};
    for (const auto& [term, w] : words) {
        const double weight[] = {w};
        auto stack = build_stack(term, level, weight, scale, cfg.min_render_size);
        if (stack.empty()) continue;
        stacks.push_back(std::move(stack));
        weights.push_back(w);
    }
    TaSchedule schedule;
    schedule.n_steps = cfg.ta_steps;
    schedule.seed = derive_seed(cfg.ta_seed, 1000 + static_cast<std::uint64_t>(topic));
    const auto laid = optimize(stacks, weights, cfg.canvas_side, schedule);

    int n_red = 0, n_green = 0;
    for (const auto& wc : colors) {
        n_red += wc.color == ColorClass::red;
        n_green += wc.color == ColorClass::green;
    }
    char name[96];
    std::snprintf(name, sizeof name, "%s_r%04d_vs_r%04d.svg", topic_stem(topic).c_str(), replication_a,
                  replication_b);
    const auto path = cfg.output_dir / "compare" / name;
    write_file(path, render_comparison(stacks, classes, laid.state));
    log << "black=" << (static_cast<int>(colors.size()) - n_red - n_green) << " green=" << n_green
        << " red=" << n_red << " -> " << path.string() << '\n';
    return path;
}

void write_synthetic_corpus(const fs::path& path, int n_topics, int n_terms, int n_docs, int doc_len,
                            std::uint64_t seed) {
    const auto synth = synth_corpus(n_topics, n_terms, n_docs, doc_len, seed);
    const auto words = synth_words(n_terms);
    std::string out;
    for (Eigen::Index d = 0; d < synth.dtm.n_docs(); ++d) {
        std::string line;
        for (CountMatrix::InnerIterator it(synth.dtm.counts, d); it; ++it)
            for (int c = 0; c < it.value(); ++c) {
                if (!line.empty()) line += ' ';
                line += words[static_cast<std::size_t>(it.col())];
            }
        out += line + '\n';
    }
    write_file(path, out);
}

}  // namespace topicci
