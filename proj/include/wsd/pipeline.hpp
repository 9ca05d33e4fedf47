#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsd/augmentation.hpp"
#include "wsd/corpus_io.hpp"
#include "wsd/encoder.hpp"
#include "wsd/heads.hpp"
#include "wsd/inference.hpp"
#include "wsd/training.hpp"

namespace wsd {

struct CorpusPaths {
    std::filesystem::path xml;
    std::filesystem::path gold;
};

struct PretrainTaskSpec {
    std::string name;
    TaskType task = TaskType::SingleSentenceClassification;
    std::filesystem::path train_file;
    std::filesystem::path dev_file;  // optional
};

struct PipelineConfig {
    std::filesystem::path wordnet_index_sense;
    std::vector<std::filesystem::path> wordnet_data_files;
    bool gloss_include_examples = false;
    bool mark_gloss_target = false;

    CorpusPaths train_corpus;                       // SemCor
    CorpusPaths dev_corpus;                         // SE07
    std::map<std::string, CorpusPaths> test_corpora;  // SE2/SE3/SE13/SE15

    std::filesystem::path output_dir;

    EncoderConfig encoder;
    SanConfig san;
    TrainConfig train;

    std::vector<std::string> routes;  // dash-separated, e.g. "en-fr-en"
    std::string mt_endpoint;          // WSD_MT_ENDPOINT env var overrides

    std::vector<PretrainTaskSpec> pretrain_tasks;
    std::string report_format = "text";
    std::string run_id = "run";

    static PipelineConfig from_file(const std::filesystem::path& path);
    static PipelineConfig from_json_text(const std::string& text,
                                         const std::filesystem::path& base_dir);
    // Throws InputError on missing input paths.
    void validate_inputs(bool need_corpora = true) const;
};

// Artifact file names inside output_dir.
namespace artifacts {
std::filesystem::path train_pairs(const PipelineConfig&);
std::filesystem::path dev_pairs(const PipelineConfig&);
std::filesystem::path test_pairs(const PipelineConfig&, const std::string& dataset);
std::filesystem::path pool(const PipelineConfig&);
std::filesystem::path audit_log(const PipelineConfig&);
std::filesystem::path pretrain_ckpt(const PipelineConfig&);
std::filesystem::path finetune_ckpt(const PipelineConfig&);
std::filesystem::path metrics(const PipelineConfig&);
std::filesystem::path report_json(const PipelineConfig&);
std::filesystem::path predictions(const PipelineConfig&, const std::string& dataset);
std::filesystem::path config_snapshot(const PipelineConfig&);
}  // namespace artifacts

SenseInventory load_inventory(const PipelineConfig& config);

// Stage entry points; each writes its artifacts into output_dir and verifies
// the prior stage's outputs exist (MissingArtifactError otherwise).
void cmd_prepare(const PipelineConfig& config);
void cmd_augment(const PipelineConfig& config, MtClient* client_override = nullptr);
void cmd_pretrain(const PipelineConfig& config);
void cmd_finetune(const PipelineConfig& config);
void cmd_evaluate(const PipelineConfig& config);
void cmd_report(const PipelineConfig& config);

}  // namespace wsd
