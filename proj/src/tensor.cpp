#include "wsd/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "wsd/errors.hpp"

namespace wsd {

double Tensor::scalar() const {
    if (rows != 1 || cols != 1) throw ShapeMismatchError("scalar() on non-1x1 tensor");
    return v[0];
}

TensorPtr make_tensor(int rows, int cols, bool needs_grad) {
    return std::make_shared<Tensor>(rows, cols, needs_grad);
}

void Tape::backward(const TensorPtr& loss) {
    if (loss->rows != 1 || loss->cols != 1)
        throw ShapeMismatchError("backward() expects a scalar loss");
    loss->g[0] = 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

namespace nn {

namespace {

void check(bool ok, const char* what) {
    if (!ok) throw ShapeMismatchError(what);
}

}  // namespace

TensorPtr matmul(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    check(a->cols == b->rows, "matmul: inner dimensions differ");
    auto out = make_tensor(a->rows, b->cols);
    for (int i = 0; i < a->rows; ++i)
        for (int k = 0; k < a->cols; ++k) {
            double av = a->at(i, k);
            if (av == 0.0) continue;
            for (int j = 0; j < b->cols; ++j) out->at(i, j) += av * b->at(k, j);
        }
    t.record([a, b, out] {
        for (int i = 0; i < a->rows; ++i)
            for (int j = 0; j < out->cols; ++j) {
                double go = out->g[static_cast<std::size_t>(i) * out->cols + j];
                if (go == 0.0) continue;
                for (int k = 0; k < a->cols; ++k) {
                    a->g[static_cast<std::size_t>(i) * a->cols + k] += go * b->at(k, j);
                    b->g[static_cast<std::size_t>(k) * b->cols + j] += go * a->at(i, k);
                }
            }
    });
    return out;
}

TensorPtr transpose(Tape& t, const TensorPtr& a) {
    auto out = make_tensor(a->cols, a->rows);
    for (int i = 0; i < a->rows; ++i)
        for (int j = 0; j < a->cols; ++j) out->at(j, i) = a->at(i, j);
    t.record([a, out] {
        for (int i = 0; i < a->rows; ++i)
            for (int j = 0; j < a->cols; ++j)
                a->g[static_cast<std::size_t>(i) * a->cols + j] += out->g[
                    static_cast<std::size_t>(j) * out->cols + i];
    });
    return out;
}

TensorPtr add(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    check(a->rows == b->rows && a->cols == b->cols, "add: shapes differ");
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] + b->v[i];
    t.record([a, b, out] {
        for (std::size_t i = 0; i < out->size(); ++i) {
            a->g[i] += out->g[i];
            b->g[i] += out->g[i];
        }
    });
    return out;
}

TensorPtr add_row(Tape& t, const TensorPtr& x, const TensorPtr& b) {
    check(b->rows == 1 && b->cols == x->cols, "add_row: bias shape");
    auto out = make_tensor(x->rows, x->cols);
    for (int i = 0; i < x->rows; ++i)
        for (int j = 0; j < x->cols; ++j) out->at(i, j) = x->at(i, j) + b->v[j];
    t.record([x, b, out] {
        for (int i = 0; i < x->rows; ++i)
            for (int j = 0; j < x->cols; ++j) {
                double go = out->g[static_cast<std::size_t>(i) * out->cols + j];
                x->g[static_cast<std::size_t>(i) * x->cols + j] += go;
                b->g[j] += go;
            }
    });
    return out;
}

TensorPtr sub(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    check(a->rows == b->rows && a->cols == b->cols, "sub: shapes differ");
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] - b->v[i];
    t.record([a, b, out] {
        for (std::size_t i = 0; i < out->size(); ++i) {
            a->g[i] += out->g[i];
            b->g[i] -= out->g[i];
        }
    });
    return out;
}

TensorPtr mul(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    check(a->rows == b->rows && a->cols == b->cols, "mul: shapes differ");
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] * b->v[i];
    t.record([a, b, out] {
        for (std::size_t i = 0; i < out->size(); ++i) {
            a->g[i] += out->g[i] * b->v[i];
            b->g[i] += out->g[i] * a->v[i];
        }
    });
    return out;
}

TensorPtr scale(Tape& t, const TensorPtr& a, double k) {
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] * k;
    t.record([a, out, k] {
        for (std::size_t i = 0; i < out->size(); ++i) a->g[i] += out->g[i] * k;
    });
    return out;
}

TensorPtr gelu(Tape& t, const TensorPtr& a) {
    static const double c = std::sqrt(2.0 / M_PI);
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) {
        double x = a->v[i];
        out->v[i] = 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x)));
    }
    t.record([a, out] {
        for (std::size_t i = 0; i < out->size(); ++i) {
            double x = a->v[i];
            double u = c * (x + 0.044715 * x * x * x);
            double th = std::tanh(u);
            double d = 0.5 * (1.0 + th) +
                       0.5 * x * (1.0 - th * th) * c * (1.0 + 3.0 * 0.044715 * x * x);
            a->g[i] += out->g[i] * d;
        }
    });
    return out;
}

TensorPtr tanh_op(Tape& t, const TensorPtr& a) {
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->v[i] = std::tanh(a->v[i]);
    t.record([a, out] {
        for (std::size_t i = 0; i < out->size(); ++i)
            a->g[i] += out->g[i] * (1.0 - out->v[i] * out->v[i]);
    });
    return out;
}

TensorPtr sigmoid(Tape& t, const TensorPtr& a) {
    auto out = make_tensor(a->rows, a->cols);
    for (std::size_t i = 0; i < out->size(); ++i) out->v[i] = 1.0 / (1.0 + std::exp(-a->v[i]));
    t.record([a, out] {
        for (std::size_t i = 0; i < out->size(); ++i)
            a->g[i] += out->g[i] * out->v[i] * (1.0 - out->v[i]);
    });
    return out;
}

TensorPtr softmax_rows(Tape& t, const TensorPtr& a) {
    auto out = make_tensor(a->rows, a->cols);
    for (int i = 0; i < a->rows; ++i) {
        double mx = a->at(i, 0);
        for (int j = 1; j < a->cols; ++j) mx = std::max(mx, a->at(i, j));
        double z = 0.0;
        for (int j = 0; j < a->cols; ++j) z += std::exp(a->at(i, j) - mx);
        for (int j = 0; j < a->cols; ++j) out->at(i, j) = std::exp(a->at(i, j) - mx) / z;
    }
    t.record([a, out] {
        for (int i = 0; i < a->rows; ++i) {
            double dot = 0.0;
            for (int j = 0; j < a->cols; ++j)
                dot += out->g[static_cast<std::size_t>(i) * out->cols + j] * out->at(i, j);
            for (int j = 0; j < a->cols; ++j)
                a->g[static_cast<std::size_t>(i) * a->cols + j] +=
                    out->at(i, j) *
                    (out->g[static_cast<std::size_t>(i) * out->cols + j] - dot);
        }
    });
    return out;
}

TensorPtr layer_norm_rows(Tape& t, const TensorPtr& x, const TensorPtr& gain,
                          const TensorPtr& bias, double eps) {
    check(gain->rows == 1 && gain->cols == x->cols, "layer_norm: gain shape");
    check(bias->rows == 1 && bias->cols == x->cols, "layer_norm: bias shape");
    int n = x->cols;
    auto out = make_tensor(x->rows, n);
    auto xhat = std::make_shared<std::vector<double>>(x->size());
    auto inv_sigma = std::make_shared<std::vector<double>>(x->rows);
    for (int i = 0; i < x->rows; ++i) {
        double mu = 0.0;
        for (int j = 0; j < n; ++j) mu += x->at(i, j);
        mu /= n;
        double var = 0.0;
        for (int j = 0; j < n; ++j) {
            double d = x->at(i, j) - mu;
            var += d * d;
        }
        var /= n;
        double is = 1.0 / std::sqrt(var + eps);
        (*inv_sigma)[i] = is;
        for (int j = 0; j < n; ++j) {
            double h = (x->at(i, j) - mu) * is;
            (*xhat)[static_cast<std::size_t>(i) * n + j] = h;
            out->at(i, j) = h * gain->v[j] + bias->v[j];
        }
    }
    t.record([x, gain, bias, out, xhat, inv_sigma, n] {
        for (int i = 0; i < x->rows; ++i) {
            double mean_dxh = 0.0, mean_dxh_xh = 0.0;
            for (int j = 0; j < n; ++j) {
                double go = out->g[static_cast<std::size_t>(i) * n + j];
                double h = (*xhat)[static_cast<std::size_t>(i) * n + j];
                gain->g[j] += go * h;
                bias->g[j] += go;
                double dxh = go * gain->v[j];
                mean_dxh += dxh;
                mean_dxh_xh += dxh * h;
            }
            mean_dxh /= n;
            mean_dxh_xh /= n;
            for (int j = 0; j < n; ++j) {
                double go = out->g[static_cast<std::size_t>(i) * n + j];
                double h = (*xhat)[static_cast<std::size_t>(i) * n + j];
                double dxh = go * gain->v[j];
                x->g[static_cast<std::size_t>(i) * n + j] +=
                    (*inv_sigma)[i] * (dxh - mean_dxh - h * mean_dxh_xh);
            }
        }
    });
    return out;
}

TensorPtr gather_rows(Tape& t, const TensorPtr& table, const std::vector<int>& indices) {
    auto out = make_tensor(static_cast<int>(indices.size()), table->cols);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        check(indices[i] >= 0 && indices[i] < table->rows, "gather_rows: index out of range");
        for (int j = 0; j < table->cols; ++j)
            out->at(static_cast<int>(i), j) = table->at(indices[i], j);
    }
    t.record([table, out, indices] {
        for (std::size_t i = 0; i < indices.size(); ++i)
            for (int j = 0; j < table->cols; ++j)
                table->g[static_cast<std::size_t>(indices[i]) * table->cols + j] +=
                    out->g[i * table->cols + j];
    });
    return out;
}

TensorPtr slice_cols(Tape& t, const TensorPtr& x, int from, int to) {
    check(0 <= from && from < to && to <= x->cols, "slice_cols: bad range");
    auto out = make_tensor(x->rows, to - from);
    for (int i = 0; i < x->rows; ++i)
        for (int j = from; j < to; ++j) out->at(i, j - from) = x->at(i, j);
    t.record([x, out, from] {
        for (int i = 0; i < x->rows; ++i)
            for (int j = 0; j < out->cols; ++j)
                x->g[static_cast<std::size_t>(i) * x->cols + from + j] +=
                    out->g[static_cast<std::size_t>(i) * out->cols + j];
    });
    return out;
}

TensorPtr slice_rows(Tape& t, const TensorPtr& x, int from, int to) {
    check(0 <= from && from < to && to <= x->rows, "slice_rows: bad range");
    auto out = make_tensor(to - from, x->cols);
    for (int i = from; i < to; ++i)
        for (int j = 0; j < x->cols; ++j) out->at(i - from, j) = x->at(i, j);
    t.record([x, out, from] {
        for (int i = 0; i < out->rows; ++i)
            for (int j = 0; j < x->cols; ++j)
                x->g[static_cast<std::size_t>(from + i) * x->cols + j] +=
                    out->g[static_cast<std::size_t>(i) * out->cols + j];
    });
    return out;
}

TensorPtr concat_cols(Tape& t, const std::vector<TensorPtr>& xs) {
    check(!xs.empty(), "concat_cols: empty input");
    int rows = xs[0]->rows, cols = 0;
    for (const auto& x : xs) {
        check(x->rows == rows, "concat_cols: row mismatch");
        cols += x->cols;
    }
    auto out = make_tensor(rows, cols);
    int off = 0;
    for (const auto& x : xs) {
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < x->cols; ++j) out->at(i, off + j) = x->at(i, j);
        off += x->cols;
    }
    t.record([xs, out, rows] {
        int off = 0;
        for (const auto& x : xs) {
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < x->cols; ++j)
                    x->g[static_cast<std::size_t>(i) * x->cols + j] +=
                        out->g[static_cast<std::size_t>(i) * out->cols + off + j];
            off += x->cols;
        }
    });
    return out;
}

TensorPtr mean_rows(Tape& t, const TensorPtr& x) {
    auto out = make_tensor(1, x->cols);
    for (int i = 0; i < x->rows; ++i)
        for (int j = 0; j < x->cols; ++j) out->v[j] += x->at(i, j);
    for (int j = 0; j < x->cols; ++j) out->v[j] /= x->rows;
    t.record([x, out] {
        for (int i = 0; i < x->rows; ++i)
            for (int j = 0; j < x->cols; ++j)
                x->g[static_cast<std::size_t>(i) * x->cols + j] += out->g[j] / x->rows;
    });
    return out;
}

TensorPtr sum_all(Tape& t, const TensorPtr& x) {
    auto out = make_tensor(1, 1);
    for (std::size_t i = 0; i < x->size(); ++i) out->v[0] += x->v[i];
    t.record([x, out] {
        for (std::size_t i = 0; i < x->size(); ++i) x->g[i] += out->g[0];
    });
    return out;
}

TensorPtr pick(Tape& t, const TensorPtr& x, int row, int col) {
    check(0 <= row && row < x->rows && 0 <= col && col < x->cols, "pick: index out of range");
    auto out = make_tensor(1, 1);
    out->v[0] = x->at(row, col);
    t.record([x, out, row, col] {
        x->g[static_cast<std::size_t>(row) * x->cols + col] += out->g[0];
    });
    return out;
}

TensorPtr neg_log(Tape& t, const TensorPtr& x) {
    auto out = make_tensor(x->rows, x->cols);
    for (std::size_t i = 0; i < x->size(); ++i) out->v[i] = -std::log(x->v[i]);
    t.record([x, out] {
        for (std::size_t i = 0; i < x->size(); ++i) x->g[i] -= out->g[i] / x->v[i];
    });
    return out;
}

TensorPtr square(Tape& t, const TensorPtr& x) {
    auto out = make_tensor(x->rows, x->cols);
    for (std::size_t i = 0; i < x->size(); ++i) out->v[i] = x->v[i] * x->v[i];
    t.record([x, out] {
        for (std::size_t i = 0; i < x->size(); ++i) x->g[i] += out->g[i] * 2.0 * x->v[i];
    });
    return out;
}

TensorPtr dropout(Tape& t, const TensorPtr& x, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return x;
    auto mask = std::make_shared<std::vector<double>>(x->size());
    double keep = 1.0 - rate;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& m : *mask) m = uni(rng) < rate ? 0.0 : 1.0 / keep;
    auto out = make_tensor(x->rows, x->cols);
    for (std::size_t i = 0; i < x->size(); ++i) out->v[i] = x->v[i] * (*mask)[i];
    t.record([x, out, mask] {
        for (std::size_t i = 0; i < x->size(); ++i) x->g[i] += out->g[i] * (*mask)[i];
    });
    return out;
}

TensorPtr cross_entropy_logits(Tape& t, const TensorPtr& logits, int label) {
    check(logits->rows == 1, "cross_entropy: expects a 1xC logits row");
    check(0 <= label && label < logits->cols, "cross_entropy: label out of range");
    double mx = logits->v[0];
    for (int j = 1; j < logits->cols; ++j) mx = std::max(mx, logits->v[j]);
    double z = 0.0;
    for (int j = 0; j < logits->cols; ++j) z += std::exp(logits->v[j] - mx);
    auto out = make_tensor(1, 1);
    out->v[0] = std::log(z) + mx - logits->v[label];
    t.record([logits, out, label, mx, z] {
        for (int j = 0; j < logits->cols; ++j) {
            double p = std::exp(logits->v[j] - mx) / z;
            logits->g[j] += out->g[0] * (p - (j == label ? 1.0 : 0.0));
        }
    });
    return out;
}

}  // namespace nn

TensorPtr ParamStore::create(const std::string& name, int rows, int cols, double sigma,
                             std::mt19937_64& rng) {
    auto tensor = make_tensor(rows, cols);
    std::normal_distribution<double> norm(0.0, sigma);
    for (auto& v : tensor->v) {
        double z;
        do {
            z = norm(rng);
        } while (std::abs(z) > 2.0 * sigma);  // truncated normal
        v = z;
    }
    if (!params_.emplace(name, tensor).second)
        throw WsdError("duplicate parameter name: " + name);
    return tensor;
}

TensorPtr ParamStore::create_const(const std::string& name, int rows, int cols, double fill) {
    auto tensor = make_tensor(rows, cols);
    std::fill(tensor->v.begin(), tensor->v.end(), fill);
    if (!params_.emplace(name, tensor).second)
        throw WsdError("duplicate parameter name: " + name);
    return tensor;
}

TensorPtr ParamStore::get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw WsdError("unknown parameter: " + name);
    return it->second;
}

void ParamStore::zero_grad() {
    for (auto& [name, p] : params_) p->zero_grad();
}

std::size_t ParamStore::value_count() const {
    std::size_t n = 0;
    for (const auto& [name, p] : params_) n += p->size();
    return n;
}

void AdamaxState::step(ParamStore& params, const AdamaxConfig& cfg) {
    ++t_;
    double bias_corr = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    for (auto& [name, p] : params.all()) {
        auto& mom = moments_[name];
        if (mom.m.empty()) {
            mom.m.assign(p->size(), 0.0);
            mom.u.assign(p->size(), 0.0);
        }
        if (mom.m.size() != p->size())
            throw ShapeMismatchError("adamax state shape mismatch for " + name);
        for (std::size_t i = 0; i < p->size(); ++i) {
            double grad = p->g[i];
            mom.m[i] = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * grad;
            mom.u[i] = std::max(cfg.beta2 * mom.u[i], std::abs(grad));
            p->v[i] -= (cfg.lr / bias_corr) * mom.m[i] / (mom.u[i] + cfg.eps);
        }
    }
}

}  // namespace wsd
