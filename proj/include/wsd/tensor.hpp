#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace wsd {

// Row-major matrix (vectors are 1xN). Gradient buffer always allocated;
// whether it is filled depends on the tape.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;
    std::vector<double> g;
    bool needs_grad = true;

    Tensor() = default;
    Tensor(int r, int c, bool grad = true)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0),
          g(static_cast<std::size_t>(r) * c, 0.0), needs_grad(grad) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
    double scalar() const;  // value of a 1x1 tensor
    void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(int rows, int cols, bool needs_grad = true);

// Records backward closures during forward computation; backward() replays
// them in reverse. One tape per forward pass, single-threaded.
class Tape {
public:
    void record(std::function<void()> fn) { steps_.push_back(std::move(fn)); }
    // Seeds d(loss)/d(loss) = 1 and accumulates into every .g buffer reached.
    void backward(const TensorPtr& loss);
    std::size_t node_count() const { return steps_.size(); }

private:
    std::vector<std::function<void()>> steps_;
};

namespace nn {

TensorPtr matmul(Tape& t, const TensorPtr& a, const TensorPtr& b);
TensorPtr transpose(Tape& t, const TensorPtr& a);
TensorPtr add(Tape& t, const TensorPtr& a, const TensorPtr& b);       // same shape
TensorPtr add_row(Tape& t, const TensorPtr& x, const TensorPtr& b);   // b is 1xN, broadcast
TensorPtr sub(Tape& t, const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(Tape& t, const TensorPtr& a, const TensorPtr& b);       // elementwise
TensorPtr scale(Tape& t, const TensorPtr& a, double k);
TensorPtr gelu(Tape& t, const TensorPtr& a);                          // tanh approximation
TensorPtr tanh_op(Tape& t, const TensorPtr& a);
TensorPtr sigmoid(Tape& t, const TensorPtr& a);
TensorPtr softmax_rows(Tape& t, const TensorPtr& a);
TensorPtr layer_norm_rows(Tape& t, const TensorPtr& x, const TensorPtr& gain,
                          const TensorPtr& bias, double eps = 1e-12);
TensorPtr gather_rows(Tape& t, const TensorPtr& table, const std::vector<int>& indices);
TensorPtr slice_cols(Tape& t, const TensorPtr& x, int from, int to);
TensorPtr slice_rows(Tape& t, const TensorPtr& x, int from, int to);
TensorPtr concat_cols(Tape& t, const std::vector<TensorPtr>& xs);
TensorPtr mean_rows(Tape& t, const TensorPtr& x);                     // MxN -> 1xN
TensorPtr sum_all(Tape& t, const TensorPtr& x);                       // -> 1x1
TensorPtr pick(Tape& t, const TensorPtr& x, int row, int col);        // -> 1x1
TensorPtr neg_log(Tape& t, const TensorPtr& x);                       // elementwise -log
TensorPtr square(Tape& t, const TensorPtr& x);
TensorPtr dropout(Tape& t, const TensorPtr& x, double rate, std::mt19937_64& rng);

// Numerically stable cross-entropy on a 1xC logits row.
TensorPtr cross_entropy_logits(Tape& t, const TensorPtr& logits, int label);

}  // namespace nn

// Named parameters in deterministic (lexicographic) iteration order.
class ParamStore {
public:
    // Truncated normal (|z| <= 2 sigma) init, or zeros/ones via sigma flags below.
    TensorPtr create(const std::string& name, int rows, int cols, double sigma,
                     std::mt19937_64& rng);
    TensorPtr create_const(const std::string& name, int rows, int cols, double fill);
    TensorPtr get(const std::string& name) const;
    bool contains(const std::string& name) const { return params_.contains(name); }
    void zero_grad();

    const std::map<std::string, TensorPtr>& all() const { return params_; }
    std::map<std::string, TensorPtr>& all() { return params_; }
    std::size_t value_count() const;

private:
    std::map<std::string, TensorPtr> params_;
};

struct AdamaxConfig {
    double lr = 2e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class AdamaxState {
public:
    // One update from the gradients currently held in the parameter tensors.
    void step(ParamStore& params, const AdamaxConfig& cfg);
    long step_count() const { return t_; }

private:
    struct Moments {
        std::vector<double> m;  // first-moment EMA
        std::vector<double> u;  // infinity-norm second moment
    };
    std::map<std::string, Moments> moments_;
    long t_ = 0;
};

}  // namespace wsd
