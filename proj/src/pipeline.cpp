#include "wsd/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"

namespace wsd {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string g_snapshot_text;  // config file contents, copied into the run dir

void write_snapshot(const PipelineConfig& config) {
    std::filesystem::create_directories(config.output_dir);
    if (g_snapshot_text.empty()) return;
    std::ofstream os(artifacts::config_snapshot(config));
    os << g_snapshot_text;
}

void require_artifact(const std::string& stage, const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifactError(stage, path.string());
}

}  // namespace

namespace artifacts {
std::filesystem::path train_pairs(const PipelineConfig& c) { return c.output_dir / "pairs.train.jsonl"; }
std::filesystem::path dev_pairs(const PipelineConfig& c) { return c.output_dir / "pairs.dev.jsonl"; }
std::filesystem::path test_pairs(const PipelineConfig& c, const std::string& dataset) {
    return c.output_dir / ("pairs.test." + dataset + ".jsonl");
}
std::filesystem::path pool(const PipelineConfig& c) { return c.output_dir / "pool.jsonl"; }
std::filesystem::path audit_log(const PipelineConfig& c) { return c.output_dir / "augment_audit.jsonl"; }
std::filesystem::path pretrain_ckpt(const PipelineConfig& c) { return c.output_dir / "ckpt.pretrain.json"; }
std::filesystem::path finetune_ckpt(const PipelineConfig& c) { return c.output_dir / "ckpt.finetune.json"; }
std::filesystem::path metrics(const PipelineConfig& c) { return c.output_dir / "metrics.jsonl"; }
std::filesystem::path report_json(const PipelineConfig& c) { return c.output_dir / "report.json"; }
std::filesystem::path predictions(const PipelineConfig& c, const std::string& dataset) {
    return c.output_dir / ("predictions." + dataset + ".txt");
}
std::filesystem::path config_snapshot(const PipelineConfig& c) { return c.output_dir / "config.snapshot.json"; }
}  // namespace artifacts

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw InputError("config file not found: " + path.string());
    std::string text = slurp(path);
    auto config = from_json_text(text, path.parent_path());
    g_snapshot_text = text;
    return config;
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text,
                                              const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config parse error: ") + e.what());
    }
    PipelineConfig c;
    try {
        const auto& wn = j.at("wordnet");
        c.wordnet_index_sense = resolve(base_dir, wn.at("index_sense").get<std::string>());
        for (const auto& f : wn.at("data_files"))
            c.wordnet_data_files.push_back(resolve(base_dir, f.get<std::string>()));
        c.gloss_include_examples = wn.value("gloss_include_examples", false);

        auto corpus = [&](const nlohmann::json& cj) {
            return CorpusPaths{resolve(base_dir, cj.at("xml").get<std::string>()),
                               resolve(base_dir, cj.at("gold").get<std::string>())};
        };
        const auto& corpora = j.at("corpora");
        c.train_corpus = corpus(corpora.at("train"));
        c.dev_corpus = corpus(corpora.at("dev"));
        if (corpora.contains("test"))
            for (const auto& [name, cj] : corpora.at("test").items())
                c.test_corpora[name] = corpus(cj);

        // output_dir stays relative to the invocation directory, not the config file
        c.output_dir = j.at("output_dir").get<std::string>();

        if (j.contains("pairgen"))
            c.mark_gloss_target = j["pairgen"].value("mark_gloss_target", false);

        if (j.contains("encoder")) {
            const auto& e = j["encoder"];
            c.encoder.d_model = e.value("d_model", c.encoder.d_model);
            c.encoder.n_layers = e.value("n_layers", c.encoder.n_layers);
            c.encoder.n_heads = e.value("n_heads", c.encoder.n_heads);
            c.encoder.max_len = e.value("max_len", c.encoder.max_len);
            c.encoder.dropout_rate = e.value("dropout_rate", c.encoder.dropout_rate);
            c.encoder.seed = e.value("seed", c.encoder.seed);
        }
        if (j.contains("san")) {
            c.san.k_steps = j["san"].value("k_steps", c.san.k_steps);
            c.san.state_dim = j["san"].value("state_dim", c.san.state_dim);
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            c.train.pretrain_epochs = t.value("pretrain_epochs", c.train.pretrain_epochs);
            c.train.finetune_epochs = t.value("finetune_epochs", c.train.finetune_epochs);
            c.train.batch_size = t.value("batch_size", c.train.batch_size);
            c.train.lr = t.value("lr", c.train.lr);
            c.train.n_augment = t.value("n_augment", c.train.n_augment);
            c.train.seed = t.value("seed", c.train.seed);
        }
        if (j.contains("augmentation")) {
            const auto& a = j["augmentation"];
            if (a.contains("routes"))
                c.routes = a["routes"].get<std::vector<std::string>>();
            c.mt_endpoint = a.value("mt_endpoint", std::string());
        }
        if (j.contains("pretrain_tasks")) {
            for (const auto& tj : j["pretrain_tasks"]) {
                PretrainTaskSpec spec;
                spec.name = tj.at("name").get<std::string>();
                auto task = task_from_name(tj.at("task").get<std::string>());
                if (!task) throw InputError("unknown task in config: " +
                                            tj.at("task").get<std::string>());
                spec.task = *task;
                spec.train_file = resolve(base_dir, tj.at("train_file").get<std::string>());
                if (tj.contains("dev_file"))
                    spec.dev_file = resolve(base_dir, tj.at("dev_file").get<std::string>());
                c.pretrain_tasks.push_back(std::move(spec));
            }
        }
        c.report_format = j.value("report_format", c.report_format);
        c.run_id = j.value("run_id", c.run_id);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config error: ") + e.what());
    }
    if (c.routes.empty())
        for (const auto& r : default_routes()) c.routes.push_back(r.label());
    if (const char* env = std::getenv("WSD_MT_ENDPOINT")) c.mt_endpoint = env;
    return c;
}

void PipelineConfig::validate_inputs(bool need_corpora) const {
    auto check = [](const std::filesystem::path& p, const std::string& what) {
        if (p.empty() || !std::filesystem::exists(p))
            throw InputError("missing " + what + ": " + p.string());
    };
    check(wordnet_index_sense, "wordnet index.sense");
    for (const auto& f : wordnet_data_files) check(f, "wordnet data file");
    if (need_corpora) {
        check(train_corpus.xml, "train corpus xml");
        check(train_corpus.gold, "train gold file");
        check(dev_corpus.xml, "dev corpus xml");
        check(dev_corpus.gold, "dev gold file");
        for (const auto& [name, paths] : test_corpora) {
            check(paths.xml, "test corpus xml (" + name + ")");
            check(paths.gold, "test gold file (" + name + ")");
        }
    }
    if (!report_format_from_name(report_format))
        throw InputError("unknown report format: " + report_format);
    encoder.validate();
    san.validate();
    train.validate();
    for (const auto& r : routes) TranslationRoute::parse(r);
}

SenseInventory load_inventory(const PipelineConfig& config) {
    return SenseInventory::load(config.wordnet_index_sense, config.wordnet_data_files,
                                config.gloss_include_examples);
}

namespace {

std::vector<GlossPair> pairs_for_split(const DatasetSplit& split, const SenseInventory& inv,
                                       const PipelineConfig& config) {
    PairGenOptions opts{.mark_gloss_target = config.mark_gloss_target};
    std::vector<GlossPair> pairs;
    for (const auto& inst : instances(split)) {
        try {
            auto p = generate_pairs(inst, inv, opts);
            pairs.insert(pairs.end(), p.begin(), p.end());
        } catch (const NoCandidatesError&) {
            log_warn("no candidates for instance " + inst.instance_id + " (" + inst.lemma +
                     "/" + std::string(pos_name(inst.pos)) + "), skipped in pair file");
        }
    }
    return pairs;
}

DatasetSplit load_split(const CorpusPaths& paths, SplitName name, const std::string& label) {
    return load_corpus(paths.xml, paths.gold, name, label);
}

}  // namespace

void cmd_prepare(const PipelineConfig& config) {
    config.validate_inputs();
    write_snapshot(config);
    auto inv = load_inventory(config);
    log_info("loaded inventory with " + std::to_string(inv.sense_count()) + " senses");

    auto train = load_split(config.train_corpus, SplitName::Train, "SemCor");
    auto train_pairs = pairs_for_split(train, inv, config);
    write_pairs(train_pairs, artifacts::train_pairs(config));

    auto stats = imbalance_stats(train_pairs);
    std::ostringstream msg;
    msg << "train pairs: " << train_pairs.size() << " (" << stats.positives << " positive, "
        << stats.negatives << " negative, ratio ";
    if (stats.undefined) msg << "undefined";
    else msg << stats.ratio;
    msg << ":1)";
    log_info(msg.str());
    std::cout << msg.str() << "\n";

    auto dev = load_split(config.dev_corpus, SplitName::Dev, "SE07");
    write_pairs(pairs_for_split(dev, inv, config), artifacts::dev_pairs(config));

    for (const auto& [name, paths] : config.test_corpora) {
        auto split = load_split(paths, SplitName::Other, name);
        write_pairs(pairs_for_split(split, inv, config), artifacts::test_pairs(config, name));
    }
}

void cmd_augment(const PipelineConfig& config, MtClient* client_override) {
    config.validate_inputs(/*need_corpora=*/false);
    write_snapshot(config);
    require_artifact("augment", artifacts::train_pairs(config));

    auto pairs = read_pairs(artifacts::train_pairs(config));
    std::vector<GlossPair> positives;
    for (const auto& p : pairs)
        if (p.label == 1) positives.push_back(p);

    std::vector<TranslationRoute> routes;
    for (const auto& r : config.routes) routes.push_back(TranslationRoute::parse(r));

    std::unique_ptr<MtClient> owned;
    MtClient* client = client_override;
    if (!client) {
        if (config.mt_endpoint.empty())
            throw InputError("no MT endpoint configured (set augmentation.mt_endpoint or "
                             "WSD_MT_ENDPOINT)");
        owned = make_http_mt_client(config.mt_endpoint);
        client = owned.get();
    }

    BuildPoolOptions opts;
    opts.audit_log_path = artifacts::audit_log(config);
    auto pool = build_pool(positives, routes, *client, opts);
    pool.save(artifacts::pool(config));

    std::size_t total = 0;
    for (const auto& [id, list] : pool.paraphrases) total += list.size();
    log_info("augmentation pool: " + std::to_string(total) + " paraphrases for " +
             std::to_string(pool.paraphrases.size()) + " instances");
}

namespace {

Vocab build_run_vocab(const PipelineConfig& config, const std::vector<TaskDataset>& tasks) {
    std::vector<std::string> texts;
    for (const auto& ds : tasks)
        for (const auto* set : {&ds.train, &ds.dev})
            for (const auto& ex : *set) {
                texts.push_back(ex.text_a);
                if (ex.text_b) texts.push_back(*ex.text_b);
                for (const auto& c : ex.candidates) texts.push_back(c);
            }
    for (const auto& pair : read_pairs(artifacts::train_pairs(config))) {
        texts.push_back(pair.context);
        texts.push_back(pair.gloss);
    }
    return Vocab::build(texts, /*min_freq=*/2);
}

std::vector<TaskDataset> load_tasks(const PipelineConfig& config) {
    std::vector<TaskDataset> tasks;
    for (const auto& spec : config.pretrain_tasks)
        tasks.push_back(TaskDataset::load(spec.name, spec.task, spec.train_file, spec.dev_file));
    return tasks;
}

}  // namespace

void cmd_pretrain(const PipelineConfig& config) {
    config.validate_inputs(/*need_corpora=*/false);
    write_snapshot(config);
    require_artifact("pretrain", artifacts::train_pairs(config));
    if (config.pretrain_tasks.empty())
        throw InputError("pretrain requires at least one entry in pretrain_tasks");

    auto tasks = load_tasks(config);
    ModelConfig mc{config.encoder, HeadConfig{.san = config.san}};
    Model model(mc, build_run_vocab(config, tasks));
    log_info("model parameters: " + std::to_string(model.params().value_count()));

    MetricsLog metrics(artifacts::metrics(config));
    auto best = pretrain(model, tasks, config.train, &metrics);
    save_checkpoint(best, artifacts::pretrain_ckpt(config));
    log_info("pretrain best dev score: " + std::to_string(best.dev_score));
}

void cmd_finetune(const PipelineConfig& config) {
    config.validate_inputs();
    write_snapshot(config);
    require_artifact("finetune", artifacts::train_pairs(config));
    require_artifact("finetune", artifacts::pretrain_ckpt(config));
    if (config.train.n_augment > 0) require_artifact("finetune", artifacts::pool(config));

    auto base = load_checkpoint(artifacts::pretrain_ckpt(config));
    auto train_pairs = read_pairs(artifacts::train_pairs(config));
    AugmentationPool pool;
    if (config.train.n_augment > 0) pool = AugmentationPool::load(artifacts::pool(config));
    auto inv = load_inventory(config);
    auto dev = load_split(config.dev_corpus, SplitName::Dev, "SE07");

    MetricsLog metrics(config.output_dir / "metrics.finetune.jsonl");
    auto best = finetune_wsd(base, train_pairs, pool, dev, inv, config.train, &metrics);
    save_checkpoint(best, artifacts::finetune_ckpt(config));
    log_info("finetune best dev F1: " + std::to_string(best.dev_score));
}

void cmd_evaluate(const PipelineConfig& config) {
    config.validate_inputs();
    write_snapshot(config);
    require_artifact("evaluate", artifacts::finetune_ckpt(config));

    auto ckpt = load_checkpoint(artifacts::finetune_ckpt(config));
    Model model(ckpt);
    auto inv = load_inventory(config);

    std::vector<std::pair<std::string, DatasetSplit>> splits;
    splits.emplace_back("SE07", load_split(config.dev_corpus, SplitName::Dev, "SE07"));
    for (const auto& [name, paths] : config.test_corpora)
        splits.emplace_back(name, load_split(paths, SplitName::Other, name));

    std::vector<Prediction> model_preds, mfs_preds;
    GoldKeyMap merged_gold;
    for (const auto& [name, split] : splits) {
        std::vector<Prediction> split_preds;
        for (const auto& inst : instances(split)) {
            auto pred = predict_instance(inst, inv, model, name);
            split_preds.push_back(pred);

            auto mfs = mfs_predict(inst, inv, name);
            mfs.instance_id = name + "/" + mfs.instance_id;
            mfs_preds.push_back(std::move(mfs));
        }
        write_predictions(split_preds, artifacts::predictions(config, name));
        for (auto& pred : split_preds) {
            pred.instance_id = name + "/" + pred.instance_id;  // ids unique per corpus only
            model_preds.push_back(std::move(pred));
        }
        for (const auto& [id, keys] : split.gold) merged_gold[name + "/" + id] = keys;
    }

    auto model_report = score_predictions(model_preds, merged_gold);
    auto mfs_report = score_predictions(mfs_preds, merged_gold);
    std::vector<std::pair<std::string, EvalReport>> rows = {{"MFS Baseline", mfs_report},
                                                            {"MTDNN+Gloss", model_report}};
    {
        std::ofstream os(artifacts::report_json(config));
        os << render_table(rows, ReportFormat::Json) << "\n";
    }
    auto format = report_format_from_name(config.report_format).value();
    std::cout << render_table(rows, format);
    if (model_report.backoff_count > 0)
        log_info("backoff predictions: " + std::to_string(model_report.backoff_count));
}

void cmd_report(const PipelineConfig& config) {
    require_artifact("report", artifacts::report_json(config));
    auto format = report_format_from_name(config.report_format);
    if (!format) throw InputError("unknown report format: " + config.report_format);
    auto text = slurp(artifacts::report_json(config));
    auto j = nlohmann::json::parse(text);
    std::vector<std::pair<std::string, EvalReport>> rows;
    for (const auto& row : j)
        rows.emplace_back(row.at("system").get<std::string>(),
                          report_from_json(row.dump(), row.at("system").get<std::string>()));
    std::cout << render_table(rows, *format);
}

}  // namespace wsd
