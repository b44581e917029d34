#include "hcfs/neuralnet.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "hcfs/text.hpp"

namespace hcfs {

std::vector<int> Mlp::dims() const {
    std::vector<int> out;
    if (layers.empty()) return out;
    out.push_back(static_cast<int>(layers.front().w.cols()));
    for (const Layer& l : layers) out.push_back(static_cast<int>(l.w.rows()));
    return out;
}

Mlp make_mlp(const std::vector<int>& dims, Activation hidden, Activation output,
             std::mt19937_64& rng, double final_scale) {
    if (dims.size() < 2) throw StructuralError("make_mlp: need at least input and output dims");
    Mlp net;
    net.layers.reserve(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const int fan_in = dims[i];
        const int fan_out = dims[i + 1];
        if (fan_in < 1 || fan_out < 1) throw StructuralError("make_mlp: non-positive layer dim");
        const bool last = (i + 2 == dims.size());
        const double bound = last ? final_scale : 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> uni(-bound, bound);
        Layer layer;
        layer.w.resize(fan_out, fan_in);
        layer.b.resize(fan_out);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) layer.w(r, c) = uni(rng);
        for (int r = 0; r < fan_out; ++r) layer.b(r) = uni(rng);
        layer.act = last ? output : hidden;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

MatrixXd apply_activation(const MatrixXd& z, Activation act) {
    switch (act) {
        case Activation::Identity:
            return z;
        case Activation::Relu:
            return z.cwiseMax(0.0);
        case Activation::Tanh:
            return z.array().tanh().matrix();
    }
    throw StructuralError("unknown activation");
}

}  // namespace

MatrixXd forward(const Mlp& net, const MatrixXd& x, ForwardCache* cache) {
    if (net.layers.empty()) throw StructuralError("forward: empty net");
    if (x.rows() != net.input_dim()) throw StructuralError("forward: input dimension mismatch");
    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->post.clear();
    }
    MatrixXd h = x;
    for (const Layer& l : net.layers) {
        MatrixXd z = (l.w * h).colwise() + l.b;
        MatrixXd activated = apply_activation(z, l.act);
        if (cache) {
            cache->pre.push_back(std::move(z));
            cache->post.push_back(activated);
        }
        h = std::move(activated);
    }
    return h;
}

VectorXd forward(const Mlp& net, const VectorXd& x) {
    return forward(net, MatrixXd(x), nullptr).col(0);
}

MlpGrads backward(const Mlp& net, const ForwardCache& cache, const MatrixXd& upstream,
                  MatrixXd* input_grad) {
    const std::size_t depth = net.layers.size();
    if (cache.pre.size() != depth || cache.post.size() != depth)
        throw StructuralError("backward: cache does not match net");
    if (cache.input.rows() != net.input_dim())
        throw StructuralError("backward: cache input dimension mismatch");
    for (std::size_t li = 0; li < depth; ++li)
        if (cache.pre[li].rows() != net.layers[li].w.rows() ||
            cache.pre[li].cols() != cache.input.cols())
            throw StructuralError("backward: cache does not match net");
    if (upstream.rows() != net.output_dim() || upstream.cols() != cache.input.cols())
        throw StructuralError("backward: upstream shape mismatch");

    MlpGrads grads;
    grads.w.resize(depth);
    grads.b.resize(depth);

    MatrixXd grad = upstream;
    for (std::size_t li = depth; li-- > 0;) {
        const Layer& l = net.layers[li];
        MatrixXd dz;
        switch (l.act) {
            case Activation::Identity:
                dz = grad;
                break;
            case Activation::Relu:
                dz = ((cache.pre[li].array() > 0.0).cast<double>() * grad.array()).matrix();
                break;
            case Activation::Tanh:
                dz = ((1.0 - cache.post[li].array().square()) * grad.array()).matrix();
                break;
        }
        const MatrixXd& h_prev = (li == 0) ? cache.input : cache.post[li - 1];
        grads.w[li] = dz * h_prev.transpose();
        grads.b[li] = dz.rowwise().sum();
        if (li > 0 || input_grad) grad = l.w.transpose() * dz;
    }
    if (input_grad) *input_grad = std::move(grad);
    return grads;
}

AdamState make_adam_state(const Mlp& net) {
    AdamState st;
    st.mw.reserve(net.layers.size());
    for (const Layer& l : net.layers) {
        st.mw.push_back(MatrixXd::Zero(l.w.rows(), l.w.cols()));
        st.vw.push_back(MatrixXd::Zero(l.w.rows(), l.w.cols()));
        st.mb.push_back(VectorXd::Zero(l.b.size()));
        st.vb.push_back(VectorXd::Zero(l.b.size()));
    }
    return st;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr) {
    const std::size_t depth = net.layers.size();
    if (grads.w.size() != depth || state.mw.size() != depth)
        throw StructuralError("adam_step: shape mismatch");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < depth; ++i) {
        state.mw[i] = state.beta1 * state.mw[i] + (1.0 - state.beta1) * grads.w[i];
        state.vw[i] = (state.beta2 * state.vw[i].array() +
                       (1.0 - state.beta2) * grads.w[i].array().square())
                          .matrix();
        net.layers[i].w.array() -=
            lr * (state.mw[i].array() / bc1) / ((state.vw[i].array() / bc2).sqrt() + state.eps);

        state.mb[i] = state.beta1 * state.mb[i] + (1.0 - state.beta1) * grads.b[i];
        state.vb[i] = (state.beta2 * state.vb[i].array() +
                       (1.0 - state.beta2) * grads.b[i].array().square())
                          .matrix();
        net.layers[i].b.array() -=
            lr * (state.mb[i].array() / bc1) / ((state.vb[i].array() / bc2).sqrt() + state.eps);
    }
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
    if (target.layers.size() != source.layers.size())
        throw StructuralError("soft_update: net shape mismatch");
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        target.layers[i].w = tau * source.layers[i].w + (1.0 - tau) * target.layers[i].w;
        target.layers[i].b = tau * source.layers[i].b + (1.0 - tau) * target.layers[i].b;
    }
}

void write_mlp_layers(std::ostream& out, const Mlp& net) {
    for (const Layer& l : net.layers) {
        for (Eigen::Index r = 0; r < l.w.rows(); ++r)
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
                if (r != 0 || c != 0) out << ' ';
                out << fmt_double(l.w(r, c));
            }
        out << '\n';
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            if (r != 0) out << ' ';
            out << fmt_double(l.b(r));
        }
        out << '\n';
    }
}

namespace {

void read_number_line(std::istream& in, int& lineno, std::vector<double>& values,
                      std::size_t expected) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("model: unexpected end of file", lineno + 1);
    ++lineno;
    values.clear();
    const std::string_view text = trim(line);
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') ++pos;
        if (pos >= text.size()) break;
        std::size_t end = text.find(' ', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto v = parse_double(text.substr(pos, end - pos));
        if (!v) throw ParseError("model: non-numeric entry", lineno);
        values.push_back(*v);
        pos = end;
    }
    if (values.size() != expected)
        throw ParseError("model: expected " + std::to_string(expected) + " entries, got " +
                             std::to_string(values.size()),
                         lineno);
}

}  // namespace

void read_mlp_layers(std::istream& in, Mlp& net, int& lineno) {
    std::vector<double> values;
    for (Layer& l : net.layers) {
        read_number_line(in, lineno, values, static_cast<std::size_t>(l.w.size()));
        std::size_t idx = 0;
        for (Eigen::Index r = 0; r < l.w.rows(); ++r)
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(r, c) = values[idx++];
        read_number_line(in, lineno, values, static_cast<std::size_t>(l.b.size()));
        for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = values[static_cast<std::size_t>(r)];
    }
}

}  // namespace hcfs
