#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsd/tensor.hpp"

namespace wsd {

// Whitespace + lowercase vocabulary with reserved specials.
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;

    static Vocab build(const std::vector<std::string>& texts, int min_freq = 2);

    int id(const std::string& token) const;  // kUnk for unknown tokens
    int size() const { return static_cast<int>(id_to_token_.size()); }
    const std::vector<std::string>& tokens() const { return id_to_token_; }
    static Vocab from_tokens(std::vector<std::string> tokens);

private:
    std::map<std::string, int> token_to_id_;
    std::vector<std::string> id_to_token_;
};

struct TokenizedPair {
    std::vector<int> ids;
    std::vector<int> segments;
    int boundary = 0;  // index of the first segment-1 token; ids.size() for single input
};

// [CLS] a... [SEP] (b... [SEP])  with longest-first truncation to max_len.
TokenizedPair tokenize(const std::string& text_a, const std::optional<std::string>& text_b,
                       const Vocab& vocab, int max_len);

struct EncoderConfig {
    int vocab_size = 0;  // filled from the vocab at model build time
    int d_model = 64;
    int n_layers = 2;
    int n_heads = 4;
    int max_len = 64;
    double dropout_rate = 0.1;
    std::uint64_t seed = 42;

    int d_ff() const { return 4 * d_model; }
    void validate() const;
};

struct PairEncoding {
    TensorPtr token_states;  // seq_len x d_model
    TensorPtr summary;       // 1 x d_model, first-position state
    int segment_boundary = 0;
};

// Transformer encoder (embeddings + segment + learned positions, post-LN
// blocks). Parameters live in an external ParamStore under "enc.*".
class Encoder {
public:
    Encoder(const EncoderConfig& config, ParamStore& params, std::mt19937_64& init_rng);

    // Attaches to parameters already present in the store (checkpoint load).
    Encoder(const EncoderConfig& config, ParamStore& params);

    PairEncoding forward(Tape& tape, const TokenizedPair& input, bool train = false,
                         std::mt19937_64* dropout_rng = nullptr) const;

    const EncoderConfig& config() const { return config_; }

    // Closed-form parameter count for a given config; tested against the store.
    static std::size_t parameter_count(const EncoderConfig& config);

private:
    EncoderConfig config_;
    ParamStore& params_;
};

}  // namespace wsd
