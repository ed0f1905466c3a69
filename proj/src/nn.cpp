#include "loraadv/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "loraadv/error.hpp"

namespace loraadv {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::None: return "None";
        case Activation::ReLU: return "ReLU";
        case Activation::SoftMax: return "SoftMax";
    }
    return "?";
}

Activation parse_activation(const std::string& s) {
    if (s == "None") return Activation::None;
    if (s == "ReLU") return Activation::ReLU;
    if (s == "SoftMax") return Activation::SoftMax;
    throw ConfigError("unknown activation '" + s + "'");
}

void glorot_fill(std::vector<double>& w, double fan_in, double fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w) v = rng.uniform(-limit, limit);
}

Conv2D make_conv(std::size_t in_channels, std::size_t filters, std::size_t kh, std::size_t kw, Activation act,
                 Rng& rng) {
    Conv2D c{filters, kh, kw, act, std::vector<double>(kh * kw * in_channels * filters), std::vector<double>(filters)};
    glorot_fill(c.weights, static_cast<double>(kh * kw * in_channels), static_cast<double>(kh * kw * filters), rng);
    return c;
}

Dense make_dense(std::size_t inputs, std::size_t units, Activation act, Rng& rng) {
    Dense d{inputs, units, act, std::vector<double>(inputs * units), std::vector<double>(units)};
    glorot_fill(d.weights, static_cast<double>(inputs), static_cast<double>(units), rng);
    return d;
}

// Per-sample intermediate values needed for backpropagation. Buffers are
// reused across calls to avoid reallocating on every training sample.
struct Trace {
    std::vector<std::vector<double>> out;  // out[0] = input, out[i + 1] = output of layer i
    std::vector<std::vector<double>> pre;  // pre-activation of conv/dense layers
    std::vector<std::vector<double>> keep;  // dropout multipliers (empty when inactive)

    void resize(std::size_t n_layers) {
        out.resize(n_layers + 1);
        pre.resize(n_layers);
        keep.resize(n_layers);
    }
};

void activate(Activation act, const std::vector<double>& z, std::vector<double>& a) {
    a.resize(z.size());
    switch (act) {
        case Activation::None: a = z; break;
        case Activation::ReLU:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
            break;
        case Activation::SoftMax: {
            const double zmax = *std::max_element(z.begin(), z.end());
            double sum = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) sum += (a[i] = std::exp(z[i] - zmax));
            for (auto& v : a) v /= sum;
            break;
        }
    }
}

void conv_forward(const Conv2D& c, const Shape& in, const std::vector<double>& x, std::vector<double>& z) {
    const std::size_t oh = in.height - c.kernel_h + 1, ow = in.width - c.kernel_w + 1, f = c.filters;
    z.assign(oh * ow * f, 0.0);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t col = 0; col < ow; ++col) {
            double* zo = &z[(r * ow + col) * f];
            std::copy(c.bias.begin(), c.bias.end(), zo);
            for (std::size_t i = 0; i < c.kernel_h; ++i) {
                for (std::size_t j = 0; j < c.kernel_w; ++j) {
                    for (std::size_t ch = 0; ch < in.channels; ++ch) {
                        const double xv = x[((r + i) * in.width + col + j) * in.channels + ch];
                        const double* w = &c.weights[((i * c.kernel_w + j) * in.channels + ch) * f];
                        for (std::size_t k = 0; k < f; ++k) zo[k] += xv * w[k];
                    }
                }
            }
        }
    }
}

void conv_backward(const Conv2D& c, const Shape& in, const std::vector<double>& x, const std::vector<double>& dz,
                   double* dw, double* db, std::vector<double>* dx) {
    const std::size_t oh = in.height - c.kernel_h + 1, ow = in.width - c.kernel_w + 1, f = c.filters;
    if (dx) dx->assign(in.size(), 0.0);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t col = 0; col < ow; ++col) {
            const double* g = &dz[(r * ow + col) * f];
            if (db)
                for (std::size_t k = 0; k < f; ++k) db[k] += g[k];
            for (std::size_t i = 0; i < c.kernel_h; ++i) {
                for (std::size_t j = 0; j < c.kernel_w; ++j) {
                    for (std::size_t ch = 0; ch < in.channels; ++ch) {
                        const std::size_t xi = ((r + i) * in.width + col + j) * in.channels + ch;
                        const std::size_t wi = ((i * c.kernel_w + j) * in.channels + ch) * f;
                        const double* w = &c.weights[wi];
                        if (dw) {
                            const double xv = x[xi];
                            for (std::size_t k = 0; k < f; ++k) dw[wi + k] += xv * g[k];
                        }
                        if (dx) {
                            double acc = 0.0;
                            for (std::size_t k = 0; k < f; ++k) acc += w[k] * g[k];
                            (*dx)[xi] += acc;
                        }
                    }
                }
            }
        }
    }
}

void dense_forward(const Dense& d, const std::vector<double>& x, std::vector<double>& z) {
    z.assign(d.bias.begin(), d.bias.end());
    for (std::size_t i = 0; i < d.inputs; ++i) {
        const double xv = x[i];
        if (xv == 0.0) continue;
        const double* w = &d.weights[i * d.units];
        for (std::size_t o = 0; o < d.units; ++o) z[o] += xv * w[o];
    }
}

void dense_backward(const Dense& d, const std::vector<double>& x, const std::vector<double>& dz, double* dw,
                    double* db, std::vector<double>* dx) {
    if (db)
        for (std::size_t o = 0; o < d.units; ++o) db[o] += dz[o];
    if (dx) dx->assign(d.inputs, 0.0);
    for (std::size_t i = 0; i < d.inputs; ++i) {
        const double* w = &d.weights[i * d.units];
        if (dw) {
            const double xv = x[i];
            if (xv != 0.0) {
                double* gw = dw + i * d.units;
                for (std::size_t o = 0; o < d.units; ++o) gw[o] += xv * dz[o];
            }
        }
        if (dx) {
            double acc = 0.0;
            for (std::size_t o = 0; o < d.units; ++o) acc += w[o] * dz[o];
            (*dx)[i] = acc;
        }
    }
}

void run_forward(const Model& model, std::span<const double> input, Mode mode, Rng* rng, Trace& tr) {
    if (input.size() != model.input_size())
        throw InputError("input has " + std::to_string(input.size()) + " values, model expects " +
                         std::to_string(model.input_size()));
    if (mode == Mode::Train && rng == nullptr) throw InputError("Train mode requires a random stream for dropout");
    const auto& layers = model.layers();
    tr.resize(layers.size());
    tr.out[0].assign(input.begin(), input.end());
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& x = tr.out[li];
        auto& y = tr.out[li + 1];
        const Shape& in_shape = li == 0 ? model.input_shape() : model.shapes()[li - 1];
        std::visit(Overloaded{
                       [&](const Conv2D& c) {
                           conv_forward(c, in_shape, x, tr.pre[li]);
                           activate(c.activation, tr.pre[li], y);
                       },
                       [&](const Flatten&) { y = x; },
                       [&](const Dense& d) {
                           dense_forward(d, x, tr.pre[li]);
                           activate(d.activation, tr.pre[li], y);
                       },
                       [&](const Dropout& dr) {
                           auto& keep = tr.keep[li];
                           if (mode == Mode::Infer || dr.rate == 0.0) {
                               keep.clear();
                               y = x;
                               return;
                           }
                           const double scale = 1.0 / (1.0 - dr.rate);
                           keep.resize(x.size());
                           y.resize(x.size());
                           for (std::size_t i = 0; i < x.size(); ++i) {
                               keep[i] = rng->uniform() >= dr.rate ? scale : 0.0;
                               y[i] = x[i] * keep[i];
                           }
                       },
                   },
                   layers[li]);
    }
}

double cross_entropy(const std::vector<double>& logits, int label) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - zmax);
    return zmax + std::log(sum) - logits[static_cast<std::size_t>(label)];
}

// Backpropagates cross-entropy from the SoftMax output down to the input.
void run_backward(const Model& model, const Trace& tr, int label, ParamGradients* pg, std::vector<double>* dx) {
    const auto& layers = model.layers();
    // dL/dlogits = p - onehot; p_y - 1 is formed as -sum of the other classes
    // since p_y rounds to exactly 1 on confident inputs.
    std::vector<double> grad = tr.out.back();
    double rest = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k)
        if (k != static_cast<std::size_t>(label)) rest += grad[k];
    grad[static_cast<std::size_t>(label)] = -rest;
    bool at_logits = true;

    // Parameter tensor index of each layer's weights.
    std::vector<std::size_t> first_param(layers.size(), 0);
    for (std::size_t li = 0, p = 0; li < layers.size(); ++li) {
        first_param[li] = p;
        if (std::holds_alternative<Conv2D>(layers[li]) || std::holds_alternative<Dense>(layers[li])) p += 2;
    }

    std::vector<double> next;
    for (std::size_t li = layers.size(); li-- > 0;) {
        const bool need_dx = li > 0 || dx != nullptr;
        const Shape& in_shape = li == 0 ? model.input_shape() : model.shapes()[li - 1];
        double* dw = pg ? (*pg)[first_param[li]].data() : nullptr;
        double* db = pg ? (*pg)[first_param[li] + 1].data() : nullptr;
        auto relu_mask = [&](Activation act) {
            if (act == Activation::ReLU && !at_logits) {
                const auto& z = tr.pre[li];
                for (std::size_t i = 0; i < grad.size(); ++i)
                    if (!(z[i] > 0.0)) grad[i] = 0.0;
            }
            at_logits = false;
        };
        std::visit(Overloaded{
                       [&](const Conv2D& c) {
                           relu_mask(c.activation);
                           conv_backward(c, in_shape, tr.out[li], grad, dw, db, need_dx ? &next : nullptr);
                           grad.swap(next);
                       },
                       [&](const Flatten&) {},
                       [&](const Dense& d) {
                           relu_mask(d.activation);
                           dense_backward(d, tr.out[li], grad, dw, db, need_dx ? &next : nullptr);
                           grad.swap(next);
                       },
                       [&](const Dropout&) {
                           const auto& keep = tr.keep[li];
                           if (!keep.empty())
                               for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= keep[i];
                       },
                   },
                   layers[li]);
    }
    if (dx) *dx = std::move(grad);
}

thread_local Trace tls_trace;

}  // namespace

std::string_view arch_name(Arch arch) {
    switch (arch) {
        case Arch::CNN: return "CNN";
        case Arch::FNN: return "FNN";
        case Arch::Custom: return "Custom";
    }
    return "?";
}

Arch parse_arch(std::string_view text) {
    if (text == "CNN" || text == "cnn") return Arch::CNN;
    if (text == "FNN" || text == "fnn") return Arch::FNN;
    if (text == "Custom") return Arch::Custom;
    throw ConfigError("unknown architecture '" + std::string(text) + "'");
}

Model Model::from_layers(Shape input, std::vector<Layer> layers, Arch arch, std::uint64_t seed) {
    if (input.size() == 0) throw ConfigError("model input shape must be non-empty");
    if (layers.empty()) throw ConfigError("model needs at least one layer");
    Model m;
    m.arch_ = arch;
    m.seed_ = seed;
    m.input_ = input;
    Shape cur = input;
    bool flat = input.height == 1 && input.width == 1;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const bool last = li + 1 == layers.size();
        std::visit(Overloaded{
                       [&](const Conv2D& c) {
                           if (c.filters == 0 || c.kernel_h == 0 || c.kernel_w == 0 || cur.height < c.kernel_h ||
                               cur.width < c.kernel_w)
                               throw ConfigError("Conv2D kernel does not fit its input");
                           if (c.weights.size() != c.kernel_h * c.kernel_w * cur.channels * c.filters ||
                               c.bias.size() != c.filters)
                               throw ConfigError("Conv2D parameter sizes do not match its shape");
                           if (c.activation == Activation::SoftMax) throw ConfigError("SoftMax only on the final Dense");
                           cur = {cur.height - c.kernel_h + 1, cur.width - c.kernel_w + 1, c.filters};
                           flat = false;
                       },
                       [&](const Flatten&) {
                           cur = {1, 1, cur.size()};
                           flat = true;
                       },
                       [&](const Dense& d) {
                           if (!flat) throw ConfigError("Dense layer needs a flattened input");
                           if (d.inputs != cur.size())
                               throw ConfigError("Dense expects " + std::to_string(d.inputs) + " inputs, got " +
                                                 std::to_string(cur.size()));
                           if (d.units == 0 || d.weights.size() != d.inputs * d.units || d.bias.size() != d.units)
                               throw ConfigError("Dense parameter sizes do not match its shape");
                           if (d.activation == Activation::SoftMax && !last)
                               throw ConfigError("SoftMax only on the final Dense");
                           cur = {1, 1, d.units};
                       },
                       [&](const Dropout& dr) {
                           if (!(dr.rate >= 0.0 && dr.rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
                       },
                   },
                   layers[li]);
        m.shapes_.push_back(cur);
    }
    const auto* out = std::get_if<Dense>(&layers.back());
    if (!out || out->units != 2 || out->activation != Activation::SoftMax)
        throw ConfigError("model must end with a 2-unit SoftMax Dense layer");
    m.layers_ = std::move(layers);
    return m;
}

std::vector<std::span<double>> Model::parameters() {
    std::vector<std::span<double>> out;
    for (auto& layer : layers_) {
        if (auto* c = std::get_if<Conv2D>(&layer)) {
            out.emplace_back(c->weights);
            out.emplace_back(c->bias);
        } else if (auto* d = std::get_if<Dense>(&layer)) {
            out.emplace_back(d->weights);
            out.emplace_back(d->bias);
        }
    }
    return out;
}

std::vector<std::span<const double>> Model::parameters() const {
    std::vector<std::span<const double>> out;
    for (auto p : const_cast<Model*>(this)->parameters()) out.emplace_back(p);
    return out;
}

Model build_model(Arch arch, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, 0x6e6e);
    std::vector<Layer> layers;
    if (arch == Arch::CNN) {
        const Shape conv_out{kIqInputShape.height, kIqInputShape.width - 2, 32};
        layers.emplace_back(make_conv(1, 32, 1, 3, Activation::ReLU, rng));
        layers.emplace_back(Flatten{});
        layers.emplace_back(make_dense(conv_out.size(), 32, Activation::ReLU, rng));
        layers.emplace_back(Dropout{0.1});
        layers.emplace_back(make_dense(32, 8, Activation::ReLU, rng));
        layers.emplace_back(Dropout{0.1});
        layers.emplace_back(make_dense(8, 2, Activation::SoftMax, rng));
    } else if (arch == Arch::FNN) {
        layers.emplace_back(Flatten{});
        layers.emplace_back(make_dense(kIqInputShape.size(), 64, Activation::ReLU, rng));
        layers.emplace_back(Dropout{0.1});
        layers.emplace_back(make_dense(64, 32, Activation::ReLU, rng));
        layers.emplace_back(Dropout{0.1});
        layers.emplace_back(make_dense(32, 8, Activation::ReLU, rng));
        layers.emplace_back(Dropout{0.1});
        layers.emplace_back(make_dense(8, 2, Activation::SoftMax, rng));
    } else {
        throw ConfigError("build_model supports CNN and FNN only");
    }
    return Model::from_layers(kIqInputShape, std::move(layers), arch, seed);
}

std::size_t count_parameters(const Model& model) {
    std::size_t n = 0;
    for (auto p : model.parameters()) n += p.size();
    return n;
}

Probabilities forward_one(const Model& model, std::span<const double> input, Mode mode, Rng* rng) {
    run_forward(model, input, mode, rng, tls_trace);
    const auto& out = tls_trace.out.back();
    return {out[0], out[1]};
}

std::vector<Probabilities> forward(const Model& model, std::span<const IqSample> batch, Mode mode, Rng* rng) {
    if (batch.empty()) throw InputError("forward needs a non-empty batch");
    std::vector<Probabilities> out;
    out.reserve(batch.size());
    for (const auto& s : batch) out.push_back(forward_one(model, s.flat(), mode, rng));
    return out;
}

int predicted_label(const Probabilities& p) { return p[1] > p[0] ? 1 : 0; }

int predict(const Model& model, const IqSample& x) { return predicted_label(forward_one(model, x.flat())); }

double loss(const Model& model, std::span<const double> input, int label) {
    run_forward(model, input, Mode::Infer, nullptr, tls_trace);
    return cross_entropy(tls_trace.pre.back(), label);
}

ParamGradients zero_gradients(const Model& model) {
    ParamGradients g;
    for (auto p : model.parameters()) g.emplace_back(p.size(), 0.0);
    return g;
}

double loss_and_gradients(const Model& model, std::span<const double> input, int label, Mode mode, Rng* rng,
                          ParamGradients* param_grads, std::vector<double>* input_grad) {
    if (label != 0 && label != 1) throw InputError("label must be 0 or 1");
    run_forward(model, input, mode, rng, tls_trace);
    const double l = cross_entropy(tls_trace.pre.back(), label);
    if (param_grads || input_grad) run_backward(model, tls_trace, label, param_grads, input_grad);
    return l;
}

std::vector<double> input_gradient(const Model& model, std::span<const double> input, int label) {
    std::vector<double> g;
    loss_and_gradients(model, input, label, Mode::Infer, nullptr, nullptr, &g);
    return g;
}

IqMatrix input_gradient(const Model& model, const IqSample& x, int label) {
    const auto g = input_gradient(model, x.flat(), label);
    IqMatrix out;
    std::copy(g.begin(), g.end(), out.values.begin());
    return out;
}

double min_relu_preactivation(const Model& model, std::span<const double> input) {
    run_forward(model, input, Mode::Infer, nullptr, tls_trace);
    double smallest = std::numeric_limits<double>::infinity();
    const auto& layers = model.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        Activation act = Activation::None;
        if (auto* c = std::get_if<Conv2D>(&layers[li])) act = c->activation;
        if (auto* d = std::get_if<Dense>(&layers[li])) act = d->activation;
        if (act != Activation::ReLU) continue;
        for (double z : tls_trace.pre[li]) smallest = std::min(smallest, std::abs(z));
    }
    return smallest;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
        throw ConfigError("Adam betas must lie in (0, 1)");
    if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be positive");
}

AdamOptimizer::AdamOptimizer(const Model& model, const TrainConfig& cfg)
    : lr_(cfg.learning_rate),
      beta1_(cfg.adam_beta1),
      beta2_(cfg.adam_beta2),
      eps_(cfg.adam_epsilon),
      m_(zero_gradients(model)),
      v_(zero_gradients(model)) {}

void AdamOptimizer::step(Model& model, const ParamGradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto params = model.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& m = m_[p];
        auto& v = v_[p];
        const auto& g = grads[p];
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            params[p][i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

TrainResult train(Model& model, std::span<const double> inputs, std::span<const int> labels, const TrainConfig& cfg) {
    cfg.validate();
    const std::size_t width = model.input_size();
    if (inputs.size() != labels.size() * width) throw InputError("inputs and labels disagree in sample count");
    for (int y : labels)
        if (y != 0 && y != 1) throw InputError("training labels must be 0 or 1");

    TrainResult result;
    const std::size_t n = labels.size();
    if (n == 0 || cfg.epochs == 0) return result;

    Rng order_rng = Rng::derive(cfg.seed, 1);
    Rng dropout_rng = Rng::derive(cfg.seed, 2);
    AdamOptimizer adam(model, cfg);
    ParamGradients grads = zero_gradients(model);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        order_rng.shuffle(std::span(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t i = order[k];
                epoch_loss += loss_and_gradients(model, inputs.subspan(i * width, width), labels[i], Mode::Train,
                                                 &dropout_rng, &grads, nullptr);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (auto& g : grads)
                for (auto& v : g) v *= inv;
            adam.step(model, grads);
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
    }
    return result;
}

TrainResult train(Model& model, const LabeledDataset& dataset, const TrainConfig& cfg) {
    if (model.input_size() != kSampleValues) throw InputError("model input does not match 2x32 I/Q samples");
    std::vector<double> flat;
    flat.reserve(dataset.n_train * kSampleValues);
    for (const auto& s : dataset.train_samples()) flat.insert(flat.end(), s.values.begin(), s.values.end());
    return train(model, flat, dataset.train_labels(), cfg);
}

Json model_to_json(const Model& model) {
    Json layers = Json::array();
    for (const auto& layer : model.layers()) {
        std::visit(Overloaded{
                       [&](const Conv2D& c) {
                           layers.push_back({{"kind", "Conv2D"},
                                             {"filters", c.filters},
                                             {"kernel", {c.kernel_h, c.kernel_w}},
                                             {"activation", activation_name(c.activation)},
                                             {"w", c.weights},
                                             {"b", c.bias}});
                       },
                       [&](const Flatten&) { layers.push_back({{"kind", "Flatten"}}); },
                       [&](const Dense& d) {
                           layers.push_back({{"kind", "Dense"},
                                             {"inputs", d.inputs},
                                             {"units", d.units},
                                             {"activation", activation_name(d.activation)},
                                             {"w", d.weights},
                                             {"b", d.bias}});
                       },
                       [&](const Dropout& d) { layers.push_back({{"kind", "Dropout"}, {"rate", d.rate}}); },
                   },
                   layer);
    }
    const Shape& in = model.input_shape();
    return Json{{"arch", arch_name(model.arch())},
                {"seed", model.seed()},
                {"input_shape", {in.height, in.width, in.channels}},
                {"layers", layers}};
}

Model model_from_json(const Json& doc) {
    reject_unknown_keys(doc, {"arch", "seed", "input_shape", "layers"}, "model");
    const Arch arch = parse_arch(doc.at("arch").get<std::string>());
    Shape in = kIqInputShape;
    if (doc.contains("input_shape")) {
        const auto& s = doc.at("input_shape");
        in = {s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()};
    }
    std::vector<Layer> layers;
    for (const auto& l : doc.at("layers")) {
        const auto kind = l.at("kind").get<std::string>();
        if (kind == "Conv2D") {
            layers.emplace_back(Conv2D{l.at("filters").get<std::size_t>(), l.at("kernel").at(0).get<std::size_t>(),
                                       l.at("kernel").at(1).get<std::size_t>(),
                                       parse_activation(l.at("activation").get<std::string>()),
                                       l.at("w").get<std::vector<double>>(), l.at("b").get<std::vector<double>>()});
        } else if (kind == "Flatten") {
            layers.emplace_back(Flatten{});
        } else if (kind == "Dense") {
            layers.emplace_back(Dense{l.at("inputs").get<std::size_t>(), l.at("units").get<std::size_t>(),
                                      parse_activation(l.at("activation").get<std::string>()),
                                      l.at("w").get<std::vector<double>>(), l.at("b").get<std::vector<double>>()});
        } else if (kind == "Dropout") {
            layers.emplace_back(Dropout{l.at("rate").get<double>()});
        } else {
            throw ConfigError("unknown layer kind '" + kind + "'");
        }
    }
    return Model::from_layers(in, std::move(layers), arch, doc.value("seed", std::uint64_t{0}));
}

}  // namespace loraadv
