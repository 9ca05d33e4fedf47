#include "wsd/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"

namespace wsd {

void TrainConfig::validate() const {
    if (pretrain_epochs < 0 || finetune_epochs < 0)
        throw InputError("epoch counts must be >= 0");
    if (batch_size <= 0) throw InputError("batch_size must be positive");
    if (lr <= 0.0) throw InputError("lr must be positive");
    if (n_augment < 0) throw InputError("n_augment must be >= 0");
}

TaskDataset TaskDataset::load(const std::string& name, TaskType task,
                              const std::filesystem::path& train_file,
                              const std::filesystem::path& dev_file) {
    auto read = [&](const std::filesystem::path& path) {
        std::vector<TaskExample> out;
        std::ifstream is(path);
        if (!is) throw IoError("cannot open " + path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            if (line.empty()) continue;
            TaskExample ex;
            try {
                ex = task_example_from_json(line);
            } catch (const nlohmann::json::exception& e) {
                throw MalformedLineError(path.string(), line_no, e.what());
            }
            if (ex.task != task)
                throw MalformedLineError(path.string(), line_no,
                                         "example task does not match dataset task");
            out.push_back(std::move(ex));
        }
        return out;
    };
    TaskDataset ds;
    ds.name = name;
    ds.task = task;
    ds.train = read(train_file);
    if (!dev_file.empty()) ds.dev = read(dev_file);
    return ds;
}

MetricsLog::MetricsLog(const std::filesystem::path& path) : path_(path) {
    std::ofstream os(path_);  // truncate at run start
    if (!os) throw IoError("cannot open metrics log " + path_.string());
}

void MetricsLog::batch(long step, Phase phase, const std::string& task, double loss) {
    if (path_.empty()) return;
    nlohmann::ordered_json j;
    j["step"] = step;
    j["phase"] = std::string(phase_name(phase));
    j["task"] = task;
    j["loss"] = loss;
    std::ofstream os(path_, std::ios::app);
    os << j.dump() << "\n";
}

void MetricsLog::dev(long step, Phase phase, double dev_score) {
    if (path_.empty()) return;
    nlohmann::ordered_json j;
    j["step"] = step;
    j["phase"] = std::string(phase_name(phase));
    j["dev_f1"] = dev_score;
    std::ofstream os(path_, std::ios::app);
    os << j.dump() << "\n";
}

namespace {

double example_accuracy(const Model& model, const TaskExample& ex) {
    Tape tape;
    auto out = route(tape, ex, model.routed(), /*train=*/false);
    switch (ex.task) {
        case TaskType::SingleSentenceClassification:
        case TaskType::PairwiseClassification: {
            if (!ex.label) return 0.0;
            auto best = std::max_element(out.probs.begin(), out.probs.end());
            return static_cast<int>(best - out.probs.begin()) == *ex.label ? 1.0 : 0.0;
        }
        case TaskType::PairwiseSimilarity: {
            if (!ex.target) return 0.0;
            double err = out.logits->v[0] - *ex.target;
            return std::max(0.0, 1.0 - err * err);
        }
        case TaskType::PairwiseRanking: {
            if (!ex.positive_index) return 0.0;
            auto best = std::max_element(out.probs.begin(), out.probs.end());
            return static_cast<int>(best - out.probs.begin()) == *ex.positive_index ? 1.0 : 0.0;
        }
    }
    return 0.0;
}

}  // namespace

double pretrain_dev_score(const Model& model, const std::vector<TaskDataset>& tasks) {
    double sum = 0.0;
    int counted = 0;
    for (const auto& ds : tasks) {
        const auto& eval_set = ds.dev.empty() ? ds.train : ds.dev;
        if (eval_set.empty()) continue;
        double acc = 0.0;
        for (const auto& ex : eval_set) acc += example_accuracy(model, ex);
        sum += 100.0 * acc / static_cast<double>(eval_set.size());
        ++counted;
    }
    return counted == 0 ? 0.0 : sum / counted;
}

Checkpoint pretrain(Model& model, const std::vector<TaskDataset>& tasks,
                    const TrainConfig& config, MetricsLog* metrics,
                    RouteCounters* counters) {
    config.validate();
    if (tasks.empty()) throw InputError("pretrain needs at least one dataset");
    for (const auto& ds : tasks)
        if (ds.train.empty()) throw InputError("EmptyDataset: " + ds.name);

    AdamaxConfig adamax{.lr = config.lr};
    AdamaxState opt;
    long step = 0;

    double init_score = pretrain_dev_score(model, tasks);
    Checkpoint best = model.to_checkpoint(step, Phase::Pretrain, init_score);

    std::mt19937_64 rng(config.seed);
    for (int epoch = 0; epoch < config.pretrain_epochs; ++epoch) {
        // homogeneous batches per dataset, then pooled shuffle
        struct Batch {
            std::size_t dataset;
            std::vector<std::size_t> items;
        };
        std::vector<Batch> batches;
        for (std::size_t d = 0; d < tasks.size(); ++d) {
            std::vector<std::size_t> order(tasks[d].train.size());
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t i = 0; i < order.size(); i += config.batch_size) {
                Batch b{d, {}};
                for (std::size_t k = i;
                     k < std::min(order.size(), i + static_cast<std::size_t>(config.batch_size));
                     ++k)
                    b.items.push_back(order[k]);
                batches.push_back(std::move(b));
            }
        }
        std::shuffle(batches.begin(), batches.end(), rng);

        for (const auto& batch : batches) {
            const auto& ds = tasks[batch.dataset];
            model.params().zero_grad();
            double loss_sum = 0.0;
            for (std::size_t idx : batch.items) {
                Tape tape;
                auto out = route(tape, ds.train[idx], model.routed(), /*train=*/true, counters);
                loss_sum += out.loss->scalar();
                tape.backward(out.loss);
            }
            double inv_n = 1.0 / static_cast<double>(batch.items.size());
            for (auto& [name, p] : model.params().all())
                for (auto& g : p->g) g *= inv_n;
            opt.step(model.params(), adamax);
            ++step;
            if (metrics)
                metrics->batch(step, Phase::Pretrain, ds.name, loss_sum * inv_n);
        }

        double score = pretrain_dev_score(model, tasks);
        if (metrics) metrics->dev(step, Phase::Pretrain, score);
        if (score > best.dev_score) best = model.to_checkpoint(step, Phase::Pretrain, score);
    }
    return best;
}

GlossPair make_augmented_pair(const GlossPair& original, const std::string& marked_paraphrase) {
    GlossPair copy = original;
    copy.context = marked_paraphrase;
    return copy;
}

std::vector<GlossPair> finetune_epoch_examples(const std::vector<GlossPair>& train_pairs,
                                               const AugmentationPool& pool, int n_augment,
                                               std::uint64_t seed, int epoch) {
    std::vector<GlossPair> out = train_pairs;
    std::size_t idx = 0;
    for (const auto& pair : train_pairs) {
        ++idx;
        if (pair.label != 1 || n_augment <= 0) continue;
        std::uint64_t draw_seed =
            seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(epoch) * 1000003ull + idx;
        for (const auto& para : sample_augmented(pool, pair.instance_id, n_augment, draw_seed))
            out.push_back(make_augmented_pair(pair, para));
    }
    return out;
}

double dev_f1(const Model& model, const DatasetSplit& dev_split, const SenseInventory& inv) {
    std::vector<Prediction> preds;
    for (const auto& inst : instances(dev_split))
        preds.push_back(predict_instance(inst, inv, model, dev_split.label));
    if (preds.empty()) return 0.0;
    return score_predictions(preds, dev_split.gold).overall;
}

Checkpoint finetune_wsd(const Checkpoint& base, const std::vector<GlossPair>& train_pairs,
                        const AugmentationPool& pool, const DatasetSplit& dev_split,
                        const SenseInventory& inv, const TrainConfig& config,
                        MetricsLog* metrics) {
    config.validate();

    std::unique_ptr<Model> model;
    if (base.parameters.contains("head.san.cls.w")) {
        model = std::make_unique<Model>(base);
    } else {
        // MissingHead: shared layers carried over, heads freshly initialized
        model = std::make_unique<Model>(base.config, Vocab::from_tokens(base.vocab_tokens));
        model->load_shared(base);
    }

    AdamaxConfig adamax{.lr = config.lr};
    AdamaxState opt;
    long step = 0;

    double init_f1 = dev_f1(*model, dev_split, inv);
    Checkpoint best = model->to_checkpoint(step, Phase::Finetune, init_f1);

    std::mt19937_64 rng(config.seed);
    for (int epoch = 0; epoch < config.finetune_epochs; ++epoch) {
        auto examples =
            finetune_epoch_examples(train_pairs, pool, config.n_augment, config.seed, epoch);
        std::shuffle(examples.begin(), examples.end(), rng);

        for (std::size_t i = 0; i < examples.size();
             i += static_cast<std::size_t>(config.batch_size)) {
            std::size_t end =
                std::min(examples.size(), i + static_cast<std::size_t>(config.batch_size));
            model->params().zero_grad();
            double loss_sum = 0.0;
            for (std::size_t k = i; k < end; ++k) {
                const auto& pair = examples[k];
                Tape tape;
                auto enc = model->encoder().forward(
                    tape, tokenize(pair.context, pair.gloss, model->vocab(),
                                   model->encoder().config().max_len));
                auto out = model->heads().san_pairwise(tape, enc, pair.label);
                loss_sum += out.loss->scalar();
                tape.backward(out.loss);
            }
            double inv_n = 1.0 / static_cast<double>(end - i);
            for (auto& [name, p] : model->params().all())
                for (auto& g : p->g) g *= inv_n;
            opt.step(model->params(), adamax);
            ++step;
            if (metrics) metrics->batch(step, Phase::Finetune, "wsd", loss_sum * inv_n);
        }

        double f1 = dev_f1(*model, dev_split, inv);
        if (metrics) metrics->dev(step, Phase::Finetune, f1);
        if (f1 > best.dev_score) best = model->to_checkpoint(step, Phase::Finetune, f1);
    }
    return best;
}

}  // namespace wsd
