#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsd/encoder.hpp"
#include "wsd/tensor.hpp"

namespace wsd {

enum class TaskType {
    SingleSentenceClassification,
    PairwiseSimilarity,
    PairwiseClassification,
    PairwiseRanking,
};

std::string_view task_name(TaskType t);
std::optional<TaskType> task_from_name(std::string_view name);

struct SanConfig {
    int k_steps = 5;
    int state_dim = 0;  // 0 = use d_model
    void validate() const;
};

struct HeadConfig {
    int ssc_classes = 2;
    int pairwise_classes = 2;
    SanConfig san;
};

struct HeadOutput {
    TensorPtr logits;  // classification: 1xC log-probabilities or logits; regression: 1x1 score
    std::vector<double> probs;  // classification heads: final class distribution
    TensorPtr loss;    // present when a label/target was supplied
};

// Task-tagged training record (JSON-lines schema in the dataset files).
struct TaskExample {
    TaskType task = TaskType::SingleSentenceClassification;
    std::string text_a;
    std::optional<std::string> text_b;
    std::optional<int> label;
    std::optional<double> target;            // similarity
    std::vector<std::string> candidates;     // ranking
    std::optional<int> positive_index;       // ranking
};

TaskExample task_example_from_json(const std::string& line);
std::string task_example_to_json(const TaskExample& ex);

// -log softmax(scores)[positive_index], on raw score values.
double ranking_loss_value(const std::vector<double>& scores, int positive_index);

// The four task-specific output layers. Parameters live under "head.*" in the
// shared store, so checkpointing and Adamax treat encoder and heads uniformly.
class Heads {
public:
    Heads(const HeadConfig& config, int d_model, ParamStore& params, std::mt19937_64& init_rng);
    Heads(const HeadConfig& config, int d_model, ParamStore& params);  // attach

    HeadOutput single_sentence(Tape& tape, const PairEncoding& enc,
                               std::optional<int> label) const;
    HeadOutput similarity(Tape& tape, const PairEncoding& enc,
                          std::optional<double> target) const;
    HeadOutput san_pairwise(Tape& tape, const PairEncoding& enc,
                            std::optional<int> label) const;
    // Scalar relevance score for one (query, candidate) encoding.
    TensorPtr ranking_score(Tape& tape, const PairEncoding& enc) const;
    // Listwise loss over pre-encoded candidates.
    HeadOutput ranking(Tape& tape, const std::vector<PairEncoding>& candidates,
                       std::optional<int> positive_index) const;

    const HeadConfig& config() const { return config_; }

    // Exposed for the K=1 reduction test: one SAN reasoning step from an
    // explicit state over an explicit memory, sharing this head's weights.
    TensorPtr san_initial_state(Tape& tape, const PairEncoding& enc) const;
    TensorPtr san_step_logits(Tape& tape, const TensorPtr& state, const TensorPtr& memory,
                              TensorPtr* state_out = nullptr) const;

    static std::vector<std::string> parameter_names(const HeadConfig& config);

private:
    HeadConfig config_;
    int d_model_ = 0;
    int state_dim_ = 0;
    ParamStore& params_;
    void create_params(std::mt19937_64& rng);
};

// Per-call head selection counters, for routing tests.
struct RouteCounters {
    int single_sentence = 0;
    int similarity = 0;
    int pairwise_classification = 0;
    int ranking = 0;
};

struct RoutedModel {
    const Encoder* encoder = nullptr;
    const Heads* heads = nullptr;
    const Vocab* vocab = nullptr;
};

// Encode the example and dispatch to exactly one head. train=true requires the
// supervision field for the task (MalformedExampleError otherwise).
HeadOutput route(Tape& tape, const TaskExample& example, const RoutedModel& model, bool train,
                 RouteCounters* counters = nullptr);

}  // namespace wsd
