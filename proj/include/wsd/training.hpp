#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wsd/augmentation.hpp"
#include "wsd/corpus_io.hpp"
#include "wsd/heads.hpp"
#include "wsd/inference.hpp"
#include "wsd/model.hpp"
#include "wsd/pairgen.hpp"

namespace wsd {

struct TrainConfig {
    int pretrain_epochs = 5;
    int finetune_epochs = 4;   // never stated upstream; configurable
    int batch_size = 256;
    double lr = 2e-5;
    int n_augment = 3;
    std::uint64_t seed = 42;
    void validate() const;
};

struct TaskDataset {
    std::string name;
    TaskType task = TaskType::SingleSentenceClassification;
    std::vector<TaskExample> train;
    std::vector<TaskExample> dev;  // falls back to train when empty

    static TaskDataset load(const std::string& name, TaskType task,
                            const std::filesystem::path& train_file,
                            const std::filesystem::path& dev_file);
};

// Append-only JSON-lines metrics sink ({step, phase, task, loss, dev_f1?}).
class MetricsLog {
public:
    MetricsLog() = default;
    explicit MetricsLog(const std::filesystem::path& path);
    void batch(long step, Phase phase, const std::string& task, double loss);
    void dev(long step, Phase phase, double dev_score);

private:
    std::filesystem::path path_;
};

// Homogeneous-task mini-batches, pooled batch list reshuffled each epoch.
// Returns the best-dev checkpoint (the initialization checkpoint when
// pretrain_epochs == 0). Mutates the model in place.
Checkpoint pretrain(Model& model, const std::vector<TaskDataset>& tasks,
                    const TrainConfig& config, MetricsLog* metrics = nullptr,
                    RouteCounters* counters = nullptr);

// Composite dev metric for the pretrain phase, in [0, 100].
double pretrain_dev_score(const Model& model, const std::vector<TaskDataset>& tasks);

GlossPair make_augmented_pair(const GlossPair& original, const std::string& marked_paraphrase);

// Shared-layer weights come from base; the SAN head carries over when present.
// Each positive pair contributes itself plus n_augment sampled paraphrase
// copies per epoch. Dev F1 is computed on dev_split each epoch; best wins.
Checkpoint finetune_wsd(const Checkpoint& base, const std::vector<GlossPair>& train_pairs,
                        const AugmentationPool& pool, const DatasetSplit& dev_split,
                        const SenseInventory& inv, const TrainConfig& config,
                        MetricsLog* metrics = nullptr);

// One epoch's example list, augmentation included; exposed for count tests.
std::vector<GlossPair> finetune_epoch_examples(const std::vector<GlossPair>& train_pairs,
                                               const AugmentationPool& pool, int n_augment,
                                               std::uint64_t seed, int epoch);

double dev_f1(const Model& model, const DatasetSplit& dev_split, const SenseInventory& inv);

}  // namespace wsd
