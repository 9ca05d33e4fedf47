#include "wsd/model.hpp"

#include <fstream>

#include <json.hpp>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"

namespace wsd {

namespace {
constexpr const char* kMagic = "wsd-checkpoint";
constexpr int kVersion = 1;
}  // namespace

std::string_view phase_name(Phase p) {
    return p == Phase::Pretrain ? "pretrain" : "finetune";
}

Model::Model(ModelConfig config, Vocab vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
    config_.encoder.vocab_size = vocab_.size();
    std::mt19937_64 rng(config_.encoder.seed);
    encoder_ = std::make_unique<Encoder>(config_.encoder, params_, rng);
    heads_ = std::make_unique<Heads>(config_.heads, config_.encoder.d_model, params_, rng);
}

Model::Model(const Checkpoint& ckpt)
    : config_(ckpt.config), vocab_(Vocab::from_tokens(ckpt.vocab_tokens)) {
    for (const auto& [name, shaped] : ckpt.parameters) {
        const auto& [rows, cols, values] = shaped;
        auto p = params_.create_const(name, rows, cols, 0.0);
        if (p->size() != values.size())
            throw VersionMismatchError("checkpoint parameter " + name + " has wrong size");
        p->v = values;
    }
    encoder_ = std::make_unique<Encoder>(config_.encoder, params_);
    heads_ = std::make_unique<Heads>(config_.heads, config_.encoder.d_model, params_);
}

bool Model::load_shared(const Checkpoint& ckpt) {
    bool heads_present = true;
    for (const auto& name : Heads::parameter_names(config_.heads))
        if (!ckpt.parameters.contains(name)) heads_present = false;
    for (auto& [name, p] : params_.all()) {
        bool is_head = name.rfind("head.", 0) == 0;
        if (is_head && !heads_present) continue;
        auto it = ckpt.parameters.find(name);
        if (it == ckpt.parameters.end()) {
            if (is_head) continue;
            throw VersionMismatchError("checkpoint lacks shared parameter " + name);
        }
        const auto& [rows, cols, values] = it->second;
        if (rows != p->rows || cols != p->cols)
            throw VersionMismatchError("shape mismatch for " + name);
        p->v = values;
    }
    if (!heads_present)
        log_warn("checkpoint lacks head parameters; heads freshly initialized");
    return heads_present;
}

Checkpoint Model::to_checkpoint(long step, Phase phase, double dev_score) const {
    Checkpoint ckpt;
    ckpt.step = step;
    ckpt.phase = phase;
    ckpt.dev_score = dev_score;
    ckpt.config = config_;
    ckpt.vocab_tokens = vocab_.tokens();
    for (const auto& [name, p] : params_.all())
        ckpt.parameters[name] = {p->rows, p->cols, p->v};
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["magic"] = kMagic;
    j["version"] = kVersion;
    j["step"] = ckpt.step;
    j["phase"] = std::string(phase_name(ckpt.phase));
    j["dev_score"] = ckpt.dev_score;
    j["encoder"] = {{"vocab_size", ckpt.config.encoder.vocab_size},
                    {"d_model", ckpt.config.encoder.d_model},
                    {"n_layers", ckpt.config.encoder.n_layers},
                    {"n_heads", ckpt.config.encoder.n_heads},
                    {"max_len", ckpt.config.encoder.max_len},
                    {"dropout_rate", ckpt.config.encoder.dropout_rate},
                    {"seed", ckpt.config.encoder.seed}};
    j["heads"] = {{"ssc_classes", ckpt.config.heads.ssc_classes},
                  {"pairwise_classes", ckpt.config.heads.pairwise_classes},
                  {"san_k_steps", ckpt.config.heads.san.k_steps},
                  {"san_state_dim", ckpt.config.heads.san.state_dim}};
    j["vocab"] = ckpt.vocab_tokens;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, shaped] : ckpt.parameters) {
        const auto& [rows, cols, values] = shaped;
        params[name] = {{"rows", rows}, {"cols", cols}, {"values", values}};
    }
    j["parameters"] = std::move(params);

    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << j.dump();
    if (!os) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw VersionMismatchError("not a checkpoint file: " + path.string());
    }
    if (!j.contains("magic") || j["magic"] != kMagic)
        throw VersionMismatchError("bad checkpoint magic in " + path.string());
    if (!j.contains("version") || j["version"].get<int>() != kVersion)
        throw VersionMismatchError("unsupported checkpoint version in " + path.string());

    Checkpoint ckpt;
    ckpt.step = j.at("step").get<long>();
    ckpt.phase = j.at("phase").get<std::string>() == "finetune" ? Phase::Finetune
                                                                : Phase::Pretrain;
    ckpt.dev_score = j.at("dev_score").get<double>();
    const auto& e = j.at("encoder");
    ckpt.config.encoder.vocab_size = e.at("vocab_size").get<int>();
    ckpt.config.encoder.d_model = e.at("d_model").get<int>();
    ckpt.config.encoder.n_layers = e.at("n_layers").get<int>();
    ckpt.config.encoder.n_heads = e.at("n_heads").get<int>();
    ckpt.config.encoder.max_len = e.at("max_len").get<int>();
    ckpt.config.encoder.dropout_rate = e.at("dropout_rate").get<double>();
    ckpt.config.encoder.seed = e.at("seed").get<std::uint64_t>();
    const auto& h = j.at("heads");
    ckpt.config.heads.ssc_classes = h.at("ssc_classes").get<int>();
    ckpt.config.heads.pairwise_classes = h.at("pairwise_classes").get<int>();
    ckpt.config.heads.san.k_steps = h.at("san_k_steps").get<int>();
    ckpt.config.heads.san.state_dim = h.at("san_state_dim").get<int>();
    ckpt.vocab_tokens = j.at("vocab").get<std::vector<std::string>>();
    for (const auto& [name, pj] : j.at("parameters").items())
        ckpt.parameters[name] = {pj.at("rows").get<int>(), pj.at("cols").get<int>(),
                                 pj.at("values").get<std::vector<double>>()};
    return ckpt;
}

}  // namespace wsd
