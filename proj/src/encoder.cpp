#include "wsd/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "wsd/errors.hpp"

namespace wsd {

namespace {

std::vector<std::string> word_tokens(const std::string& text) {
    std::string lowered = text;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::istringstream in(lowered);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

}  // namespace

Vocab Vocab::build(const std::vector<std::string>& texts, int min_freq) {
    std::map<std::string, int> freq;
    for (const auto& text : texts)
        for (const auto& tok : word_tokens(text)) ++freq[tok];
    std::vector<std::string> kept = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
    for (const auto& [tok, n] : freq)
        if (n >= min_freq) kept.push_back(tok);
    return from_tokens(std::move(kept));
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
    Vocab v;
    v.id_to_token_ = std::move(tokens);
    for (std::size_t i = 0; i < v.id_to_token_.size(); ++i)
        v.token_to_id_[v.id_to_token_[i]] = static_cast<int>(i);
    return v;
}

int Vocab::id(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnk : it->second;
}

TokenizedPair tokenize(const std::string& text_a, const std::optional<std::string>& text_b,
                       const Vocab& vocab, int max_len) {
    auto a = word_tokens(text_a);
    std::vector<std::string> b;
    if (text_b) b = word_tokens(*text_b);

    // specials: [CLS] + [SEP] (+ [SEP] for the second segment)
    std::size_t specials = text_b ? 3 : 2;
    while (a.size() + b.size() + specials > static_cast<std::size_t>(max_len)) {
        if (a.size() >= b.size() && !a.empty()) a.pop_back();
        else if (!b.empty()) b.pop_back();
        else break;
    }

    TokenizedPair out;
    out.ids.push_back(Vocab::kCls);
    out.segments.push_back(0);
    for (const auto& tok : a) {
        out.ids.push_back(vocab.id(tok));
        out.segments.push_back(0);
    }
    out.ids.push_back(Vocab::kSep);
    out.segments.push_back(0);
    out.boundary = static_cast<int>(out.ids.size());
    if (text_b) {
        for (const auto& tok : b) {
            out.ids.push_back(vocab.id(tok));
            out.segments.push_back(1);
        }
        out.ids.push_back(Vocab::kSep);
        out.segments.push_back(1);
    }
    return out;
}

void EncoderConfig::validate() const {
    // vocab_size 0 means "not yet bound to a vocabulary"
    if (vocab_size < 0 || d_model <= 0 || n_layers <= 0 || n_heads <= 0 || max_len <= 0)
        throw InputError("encoder config values must be positive");
    if (d_model % n_heads != 0)
        throw InputError("d_model must be divisible by n_heads");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw InputError("dropout_rate must be in [0, 1)");
}

Encoder::Encoder(const EncoderConfig& config, ParamStore& params, std::mt19937_64& init_rng)
    : config_(config), params_(params) {
    config_.validate();
    if (config_.vocab_size <= 0) throw InputError("encoder needs a non-empty vocabulary");
    const int d = config_.d_model;
    const double sigma = 0.02;
    params_.create("enc.emb.tok", config_.vocab_size, d, sigma, init_rng);
    params_.create("enc.emb.pos", config_.max_len, d, sigma, init_rng);
    params_.create("enc.emb.seg", 2, d, sigma, init_rng);
    params_.create_const("enc.emb.ln.g", 1, d, 1.0);
    params_.create_const("enc.emb.ln.b", 1, d, 0.0);
    for (int l = 0; l < config_.n_layers; ++l) {
        std::string p = "enc.layer" + std::to_string(l) + ".";
        for (const char* m : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"})
            params_.create(p + m, d, d, sigma, init_rng);
        for (const char* m : {"attn.bq", "attn.bk", "attn.bv", "attn.bo"})
            params_.create_const(p + m, 1, d, 0.0);
        params_.create_const(p + "ln1.g", 1, d, 1.0);
        params_.create_const(p + "ln1.b", 1, d, 0.0);
        params_.create(p + "ffn.w1", d, config_.d_ff(), sigma, init_rng);
        params_.create_const(p + "ffn.b1", 1, config_.d_ff(), 0.0);
        params_.create(p + "ffn.w2", config_.d_ff(), d, sigma, init_rng);
        params_.create_const(p + "ffn.b2", 1, d, 0.0);
        params_.create_const(p + "ln2.g", 1, d, 1.0);
        params_.create_const(p + "ln2.b", 1, d, 0.0);
    }
}

Encoder::Encoder(const EncoderConfig& config, ParamStore& params)
    : config_(config), params_(params) {
    config_.validate();
    params_.get("enc.emb.tok");  // sanity: parameters must already exist
}

std::size_t Encoder::parameter_count(const EncoderConfig& c) {
    std::size_t d = static_cast<std::size_t>(c.d_model);
    std::size_t emb = (static_cast<std::size_t>(c.vocab_size) + c.max_len + 2) * d + 2 * d;
    std::size_t per_layer = 12 * d * d + 13 * d;
    return emb + static_cast<std::size_t>(c.n_layers) * per_layer;
}

PairEncoding Encoder::forward(Tape& tape, const TokenizedPair& input, bool train,
                              std::mt19937_64* dropout_rng) const {
    const int seq_len = static_cast<int>(input.ids.size());
    if (seq_len > config_.max_len)
        throw ShapeMismatchError("sequence longer than max_len");
    const int d = config_.d_model;
    const int dh = d / config_.n_heads;
    const bool drop = train && config_.dropout_rate > 0.0 && dropout_rng != nullptr;

    std::vector<int> positions(seq_len);
    for (int i = 0; i < seq_len; ++i) positions[i] = i;

    using namespace nn;
    auto x = add(tape,
                 add(tape, gather_rows(tape, params_.get("enc.emb.tok"), input.ids),
                     gather_rows(tape, params_.get("enc.emb.pos"), positions)),
                 gather_rows(tape, params_.get("enc.emb.seg"), input.segments));
    x = layer_norm_rows(tape, x, params_.get("enc.emb.ln.g"), params_.get("enc.emb.ln.b"));
    if (drop) x = dropout(tape, x, config_.dropout_rate, *dropout_rng);

    for (int l = 0; l < config_.n_layers; ++l) {
        std::string p = "enc.layer" + std::to_string(l) + ".";
        auto q = add_row(tape, matmul(tape, x, params_.get(p + "attn.wq")),
                         params_.get(p + "attn.bq"));
        auto k = add_row(tape, matmul(tape, x, params_.get(p + "attn.wk")),
                         params_.get(p + "attn.bk"));
        auto v = add_row(tape, matmul(tape, x, params_.get(p + "attn.wv")),
                         params_.get(p + "attn.bv"));
        std::vector<TensorPtr> head_ctx;
        for (int h = 0; h < config_.n_heads; ++h) {
            auto qh = slice_cols(tape, q, h * dh, (h + 1) * dh);
            auto kh = slice_cols(tape, k, h * dh, (h + 1) * dh);
            auto vh = slice_cols(tape, v, h * dh, (h + 1) * dh);
            auto scores = scale(tape, matmul(tape, qh, transpose(tape, kh)),
                                1.0 / std::sqrt(static_cast<double>(dh)));
            auto attn = softmax_rows(tape, scores);
            if (drop) attn = dropout(tape, attn, config_.dropout_rate, *dropout_rng);
            head_ctx.push_back(matmul(tape, attn, vh));
        }
        auto ctx = add_row(tape,
                           matmul(tape, concat_cols(tape, head_ctx), params_.get(p + "attn.wo")),
                           params_.get(p + "attn.bo"));
        if (drop) ctx = dropout(tape, ctx, config_.dropout_rate, *dropout_rng);
        x = layer_norm_rows(tape, add(tape, x, ctx), params_.get(p + "ln1.g"),
                            params_.get(p + "ln1.b"));

        auto ff = add_row(tape,
                          matmul(tape,
                                 gelu(tape, add_row(tape,
                                                    matmul(tape, x, params_.get(p + "ffn.w1")),
                                                    params_.get(p + "ffn.b1"))),
                                 params_.get(p + "ffn.w2")),
                          params_.get(p + "ffn.b2"));
        if (drop) ff = dropout(tape, ff, config_.dropout_rate, *dropout_rng);
        x = layer_norm_rows(tape, add(tape, x, ff), params_.get(p + "ln2.g"),
                            params_.get(p + "ln2.b"));
    }

    PairEncoding out;
    out.token_states = x;
    out.summary = nn::slice_rows(tape, x, 0, 1);
    out.segment_boundary = input.boundary;
    return out;
}

}  // namespace wsd
