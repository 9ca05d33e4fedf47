#include "wsd/heads.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "wsd/errors.hpp"

namespace wsd {

std::string_view task_name(TaskType t) {
    switch (t) {
        case TaskType::SingleSentenceClassification: return "single_sentence_classification";
        case TaskType::PairwiseSimilarity: return "pairwise_similarity";
        case TaskType::PairwiseClassification: return "pairwise_classification";
        case TaskType::PairwiseRanking: return "pairwise_ranking";
    }
    return "?";
}

std::optional<TaskType> task_from_name(std::string_view name) {
    for (TaskType t : {TaskType::SingleSentenceClassification, TaskType::PairwiseSimilarity,
                       TaskType::PairwiseClassification, TaskType::PairwiseRanking})
        if (task_name(t) == name) return t;
    return std::nullopt;
}

void SanConfig::validate() const {
    if (k_steps < 1) throw InputError("SAN k_steps must be >= 1");
    if (state_dim < 0) throw InputError("SAN state_dim must be >= 0");
}

TaskExample task_example_from_json(const std::string& line) {
    auto j = nlohmann::json::parse(line);
    TaskExample ex;
    auto task = task_from_name(j.at("task").get<std::string>());
    if (!task) throw InputError("unknown task: " + j.at("task").get<std::string>());
    ex.task = *task;
    ex.text_a = j.at("text_a").get<std::string>();
    if (j.contains("text_b")) ex.text_b = j.at("text_b").get<std::string>();
    if (j.contains("label")) ex.label = j.at("label").get<int>();
    if (j.contains("target")) ex.target = j.at("target").get<double>();
    if (j.contains("candidates"))
        ex.candidates = j.at("candidates").get<std::vector<std::string>>();
    if (j.contains("positive_index")) ex.positive_index = j.at("positive_index").get<int>();
    return ex;
}

std::string task_example_to_json(const TaskExample& ex) {
    nlohmann::ordered_json j;
    j["task"] = std::string(task_name(ex.task));
    j["text_a"] = ex.text_a;
    if (ex.text_b) j["text_b"] = *ex.text_b;
    if (ex.label) j["label"] = *ex.label;
    if (ex.target) j["target"] = *ex.target;
    if (!ex.candidates.empty()) j["candidates"] = ex.candidates;
    if (ex.positive_index) j["positive_index"] = *ex.positive_index;
    return j.dump();
}

double ranking_loss_value(const std::vector<double>& scores, int positive_index) {
    if (scores.empty()) throw WsdError("ranking_loss on empty candidate list");
    if (positive_index < 0 || positive_index >= static_cast<int>(scores.size()))
        throw WsdError("ranking_loss positive_index out of range");
    double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - mx);
    return std::log(z) + mx - scores[positive_index];
}

Heads::Heads(const HeadConfig& config, int d_model, ParamStore& params,
             std::mt19937_64& init_rng)
    : config_(config), d_model_(d_model),
      state_dim_(config.san.state_dim > 0 ? config.san.state_dim : d_model),
      params_(params) {
    config_.san.validate();
    create_params(init_rng);
}

Heads::Heads(const HeadConfig& config, int d_model, ParamStore& params)
    : config_(config), d_model_(d_model),
      state_dim_(config.san.state_dim > 0 ? config.san.state_dim : d_model),
      params_(params) {
    config_.san.validate();
    params_.get("head.san.cls.w");
}

std::vector<std::string> Heads::parameter_names(const HeadConfig&) {
    std::vector<std::string> names = {"head.ssc.w", "head.ssc.b", "head.sim.w", "head.sim.b",
                                      "head.rank.w", "head.rank.b",
                                      "head.san.pool.w", "head.san.s0.w", "head.san.s0.b",
                                      "head.san.attn.w", "head.san.cls.w", "head.san.cls.b"};
    for (const char* gate : {"z", "r", "h"}) {
        names.push_back(std::string("head.san.gru.w") + gate);
        names.push_back(std::string("head.san.gru.u") + gate);
        names.push_back(std::string("head.san.gru.b") + gate);
    }
    std::sort(names.begin(), names.end());
    return names;
}

void Heads::create_params(std::mt19937_64& rng) {
    const int d = d_model_, s = state_dim_;
    const double sigma = 0.02;
    params_.create("head.ssc.w", d, config_.ssc_classes, sigma, rng);
    params_.create_const("head.ssc.b", 1, config_.ssc_classes, 0.0);
    params_.create("head.sim.w", d, 1, sigma, rng);
    params_.create_const("head.sim.b", 1, 1, 0.0);
    params_.create("head.rank.w", d, 1, sigma, rng);
    params_.create_const("head.rank.b", 1, 1, 0.0);
    params_.create("head.san.pool.w", d, 1, sigma, rng);
    params_.create("head.san.s0.w", d, s, sigma, rng);
    params_.create_const("head.san.s0.b", 1, s, 0.0);
    params_.create("head.san.attn.w", s, d, sigma, rng);
    for (const char* gate : {"z", "r", "h"}) {
        params_.create(std::string("head.san.gru.w") + gate, d, s, sigma, rng);
        params_.create(std::string("head.san.gru.u") + gate, s, s, sigma, rng);
        params_.create_const(std::string("head.san.gru.b") + gate, 1, s, 0.0);
    }
    params_.create("head.san.cls.w", s + d, config_.pairwise_classes, sigma, rng);
    params_.create_const("head.san.cls.b", 1, config_.pairwise_classes, 0.0);
}

HeadOutput Heads::single_sentence(Tape& tape, const PairEncoding& enc,
                                  std::optional<int> label) const {
    using namespace nn;
    auto logits = add_row(tape, matmul(tape, enc.summary, params_.get("head.ssc.w")),
                          params_.get("head.ssc.b"));
    HeadOutput out;
    out.logits = logits;
    auto p = softmax_rows(tape, logits);
    out.probs = p->v;
    if (label) {
        if (*label < 0 || *label >= config_.ssc_classes)
            throw WsdError("label out of range for single-sentence head");
        out.loss = cross_entropy_logits(tape, logits, *label);
    }
    return out;
}

HeadOutput Heads::similarity(Tape& tape, const PairEncoding& enc,
                             std::optional<double> target) const {
    using namespace nn;
    auto score = add_row(tape, matmul(tape, enc.summary, params_.get("head.sim.w")),
                         params_.get("head.sim.b"));
    HeadOutput out;
    out.logits = score;
    if (target) {
        auto target_t = make_tensor(1, 1, false);
        target_t->v[0] = *target;
        out.loss = square(tape, sub(tape, score, target_t));
    }
    return out;
}

TensorPtr Heads::san_initial_state(Tape& tape, const PairEncoding& enc) const {
    using namespace nn;
    if (enc.segment_boundary <= 0 || enc.segment_boundary >= enc.token_states->rows)
        throw ShapeMismatchError("SAN head needs a pair encoding with a valid boundary");
    auto ctx = slice_rows(tape, enc.token_states, 0, enc.segment_boundary);
    auto alpha = softmax_rows(
        tape, transpose(tape, matmul(tape, ctx, params_.get("head.san.pool.w"))));
    auto pooled = matmul(tape, alpha, ctx);
    return tanh_op(tape, add_row(tape, matmul(tape, pooled, params_.get("head.san.s0.w")),
                                 params_.get("head.san.s0.b")));
}

TensorPtr Heads::san_step_logits(Tape& tape, const TensorPtr& state, const TensorPtr& memory,
                                 TensorPtr* state_out) const {
    using namespace nn;
    auto scores = matmul(tape, matmul(tape, state, params_.get("head.san.attn.w")),
                         transpose(tape, memory));
    auto beta = softmax_rows(tape, scores);
    auto x = matmul(tape, beta, memory);  // 1 x d_model

    auto gate = [&](const char* g) {
        return add_row(tape,
                       add(tape, matmul(tape, x, params_.get(std::string("head.san.gru.w") + g)),
                           matmul(tape, state, params_.get(std::string("head.san.gru.u") + g))),
                       params_.get(std::string("head.san.gru.b") + g));
    };
    auto z = sigmoid(tape, gate("z"));
    auto r = sigmoid(tape, gate("r"));
    auto h = tanh_op(
        tape, add_row(tape,
                      add(tape, matmul(tape, x, params_.get("head.san.gru.wh")),
                          matmul(tape, mul(tape, r, state), params_.get("head.san.gru.uh"))),
                      params_.get("head.san.gru.bh")));
    auto next = add(tape, sub(tape, state, mul(tape, z, state)), mul(tape, z, h));
    if (state_out) *state_out = next;

    auto features = concat_cols(tape, {next, x});
    return add_row(tape, matmul(tape, features, params_.get("head.san.cls.w")),
                   params_.get("head.san.cls.b"));
}

HeadOutput Heads::san_pairwise(Tape& tape, const PairEncoding& enc,
                               std::optional<int> label) const {
    using namespace nn;
    if (enc.segment_boundary >= enc.token_states->rows)
        throw ShapeMismatchError("SAN head needs a second segment as memory");
    auto memory = slice_rows(tape, enc.token_states, enc.segment_boundary,
                             enc.token_states->rows);
    auto state = san_initial_state(tape, enc);

    TensorPtr prob_sum;
    for (int k = 0; k < config_.san.k_steps; ++k) {
        auto logits = san_step_logits(tape, state, memory, &state);
        auto p = softmax_rows(tape, logits);
        prob_sum = prob_sum ? add(tape, prob_sum, p) : p;
    }
    auto combined = scale(tape, prob_sum, 1.0 / config_.san.k_steps);

    HeadOutput out;
    out.logits = combined;  // combined class distribution
    out.probs = combined->v;
    if (label) {
        if (*label < 0 || *label >= config_.pairwise_classes)
            throw WsdError("label out of range for SAN head");
        out.loss = neg_log(tape, pick(tape, combined, 0, *label));
    }
    return out;
}

TensorPtr Heads::ranking_score(Tape& tape, const PairEncoding& enc) const {
    using namespace nn;
    return add_row(tape, matmul(tape, enc.summary, params_.get("head.rank.w")),
                   params_.get("head.rank.b"));
}

HeadOutput Heads::ranking(Tape& tape, const std::vector<PairEncoding>& candidates,
                          std::optional<int> positive_index) const {
    using namespace nn;
    if (candidates.empty()) throw WsdError("ranking head needs at least one candidate");
    std::vector<TensorPtr> scores;
    scores.reserve(candidates.size());
    for (const auto& enc : candidates) scores.push_back(ranking_score(tape, enc));
    auto row = concat_cols(tape, scores);

    HeadOutput out;
    out.logits = row;
    out.probs = softmax_rows(tape, row)->v;
    if (positive_index) {
        if (*positive_index < 0 || *positive_index >= static_cast<int>(candidates.size()))
            throw WsdError("ranking positive_index out of range");
        out.loss = cross_entropy_logits(tape, row, *positive_index);
    }
    return out;
}

HeadOutput route(Tape& tape, const TaskExample& ex, const RoutedModel& model, bool train,
                 RouteCounters* counters) {
    auto require = [&](bool present, const char* field) {
        if (!present) throw MalformedExampleError(std::string(task_name(ex.task)), field);
    };
    const auto& cfg = model.encoder->config();

    switch (ex.task) {
        case TaskType::SingleSentenceClassification: {
            if (train) require(ex.label.has_value(), "label");
            auto enc = model.encoder->forward(
                tape, tokenize(ex.text_a, std::nullopt, *model.vocab, cfg.max_len));
            if (counters) ++counters->single_sentence;
            return model.heads->single_sentence(tape, enc, ex.label);
        }
        case TaskType::PairwiseSimilarity: {
            require(ex.text_b.has_value(), "text_b");
            if (train) require(ex.target.has_value(), "target");
            auto enc = model.encoder->forward(
                tape, tokenize(ex.text_a, ex.text_b, *model.vocab, cfg.max_len));
            if (counters) ++counters->similarity;
            return model.heads->similarity(tape, enc, ex.target);
        }
        case TaskType::PairwiseClassification: {
            require(ex.text_b.has_value(), "text_b");
            if (train) require(ex.label.has_value(), "label");
            auto enc = model.encoder->forward(
                tape, tokenize(ex.text_a, ex.text_b, *model.vocab, cfg.max_len));
            if (counters) ++counters->pairwise_classification;
            return model.heads->san_pairwise(tape, enc, ex.label);
        }
        case TaskType::PairwiseRanking: {
            require(!ex.candidates.empty(), "candidates");
            if (train) require(ex.positive_index.has_value(), "positive_index");
            std::vector<PairEncoding> encs;
            encs.reserve(ex.candidates.size());
            for (const auto& cand : ex.candidates)
                encs.push_back(model.encoder->forward(
                    tape, tokenize(ex.text_a, cand, *model.vocab, cfg.max_len)));
            if (counters) ++counters->ranking;
            return model.heads->ranking(tape, encs, ex.positive_index);
        }
    }
    throw WsdError("unhandled task type");
}

}  // namespace wsd
