#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "wsd/encoder.hpp"
#include "wsd/heads.hpp"

namespace wsd {

struct ModelConfig {
    EncoderConfig encoder;
    HeadConfig heads;
};

enum class Phase { Pretrain, Finetune };

std::string_view phase_name(Phase p);

struct Checkpoint {
    long step = 0;
    Phase phase = Phase::Pretrain;
    double dev_score = 0.0;  // [0, 100]
    ModelConfig config;
    std::vector<std::string> vocab_tokens;
    // name -> (rows, cols, values)
    std::map<std::string, std::tuple<int, int, std::vector<double>>> parameters;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Shared encoder + four heads over one parameter store.
class Model {
public:
    // Fresh init, seeded from config.encoder.seed. vocab_size is taken from
    // the vocab.
    Model(ModelConfig config, Vocab vocab);

    // Restore from a checkpoint (exact parameter values).
    explicit Model(const Checkpoint& ckpt);

    // Restore shared layers from ckpt; head parameters are carried over when
    // present and freshly initialized otherwise (returns false in that case).
    bool load_shared(const Checkpoint& ckpt);

    Checkpoint to_checkpoint(long step, Phase phase, double dev_score) const;

    const Encoder& encoder() const { return *encoder_; }
    const Heads& heads() const { return *heads_; }
    const Vocab& vocab() const { return vocab_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const ModelConfig& config() const { return config_; }
    RoutedModel routed() const { return {encoder_.get(), heads_.get(), &vocab_}; }

private:
    ModelConfig config_;
    Vocab vocab_;
    ParamStore params_;
    std::unique_ptr<Encoder> encoder_;
    std::unique_ptr<Heads> heads_;
};

}  // namespace wsd
