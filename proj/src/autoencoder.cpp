#include "bigset/autoencoder.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "bigset/errors.hpp"
#include "binary_io.hpp"

namespace bigset {

namespace {

constexpr char kCheckpointMagic[4] = {'B', 'G', 'A', 'E'};

Eigen::Map<const Eigen::MatrixXd> pixel_matrix(const HsiCube& cube) {
    return {cube.data().data(), static_cast<Eigen::Index>(cube.pixels()),
            static_cast<Eigen::Index>(cube.bands())};
}

void require_finite(const Eigen::MatrixXd& m, const char* name) {
    if (!m.allFinite()) throw NumericError(std::string("gradient of ") + name + " has non-finite entries");
}

void adam_update(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                 const AdamSettings& s, double correction1, double correction2) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + s.epsilon);
}

void adam_update(Eigen::VectorXd& param, const Eigen::VectorXd& grad, Eigen::VectorXd& m, Eigen::VectorXd& v,
                 const AdamSettings& s, double correction1, double correction2) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + s.epsilon);
}

void append_matrix(std::string& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) detail::append_le(out, m(r, c));
}

void append_vector(std::string& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) detail::append_le(out, v(i));
}

void append_params(std::string& out, const AeParams& p) {
    append_matrix(out, p.w1);
    append_vector(out, p.b1);
    append_matrix(out, p.w2);
    append_vector(out, p.b2);
}

void read_params(detail::ByteReader& in, AeParams& p) {
    for (Eigen::Index r = 0; r < p.w1.rows(); ++r)
        for (Eigen::Index c = 0; c < p.w1.cols(); ++c) p.w1(r, c) = in.read<double>();
    for (Eigen::Index i = 0; i < p.b1.size(); ++i) p.b1(i) = in.read<double>();
    for (Eigen::Index r = 0; r < p.w2.rows(); ++r)
        for (Eigen::Index c = 0; c < p.w2.cols(); ++c) p.w2(r, c) = in.read<double>();
    for (Eigen::Index i = 0; i < p.b2.size(); ++i) p.b2(i) = in.read<double>();
}

}  // namespace

AeParams AeParams::zeros(std::size_t bands, std::size_t hidden) {
    const auto L = static_cast<Eigen::Index>(bands), Hd = static_cast<Eigen::Index>(hidden);
    return {Eigen::MatrixXd::Zero(Hd, L), Eigen::VectorXd::Zero(Hd), Eigen::MatrixXd::Zero(L, Hd),
            Eigen::VectorXd::Zero(L)};
}

bool AeParams::same_shape(const AeParams& o) const noexcept {
    return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && b1.size() == o.b1.size() &&
           w2.rows() == o.w2.rows() && w2.cols() == o.w2.cols() && b2.size() == o.b2.size();
}

AeParams init_params(std::size_t bands, std::size_t hidden, std::uint64_t seed) {
    if (bands == 0 || hidden == 0) throw std::invalid_argument("autoencoder needs bands >= 1 and hidden >= 1");
    AeParams p = AeParams::zeros(bands, hidden);
    std::mt19937_64 rng(seed);
    const double limit = std::sqrt(6.0 / static_cast<double>(bands + hidden));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    // Both layers have fan_in + fan_out = L + hidden.
    for (Eigen::Index r = 0; r < p.w1.rows(); ++r)
        for (Eigen::Index c = 0; c < p.w1.cols(); ++c) p.w1(r, c) = uniform(rng);
    for (Eigen::Index r = 0; r < p.w2.rows(); ++r)
        for (Eigen::Index c = 0; c < p.w2.cols(); ++c) p.w2(r, c) = uniform(rng);
    return p;
}

ForwardResult ae_forward(const AeParams& params, const HsiCube& cube) {
    if (cube.bands() != params.bands()) {
        throw DataError("cube has " + std::to_string(cube.bands()) + " bands, the autoencoder expects " +
                        std::to_string(params.bands()));
    }
    AeCache cache;
    cache.height = cube.height();
    cache.width = cube.width();
    cache.input = pixel_matrix(cube);
    cache.pre_activation = cache.input * params.w1.transpose();
    cache.pre_activation.rowwise() += params.b1.transpose();
    cache.activation = cache.pre_activation.cwiseMax(0.0);

    HsiCube out(cube.height(), cube.width(), cube.bands());
    Eigen::Map<Eigen::MatrixXd> y(out.data().data(), static_cast<Eigen::Index>(cube.pixels()),
                                  static_cast<Eigen::Index>(cube.bands()));
    y.noalias() = cache.activation * params.w2.transpose();
    y.rowwise() += params.b2.transpose();
    return {std::move(out), std::move(cache)};
}

AeGrads ae_backward(const AeParams& params, const AeCache& cache, const HsiCube& grad_out) {
    if (grad_out.height() != cache.height || grad_out.width() != cache.width ||
        grad_out.bands() != params.bands() || cache.input.cols() != params.w1.cols() ||
        cache.pre_activation.cols() != params.w1.rows()) {
        throw DataError("gradient or cache does not match the autoencoder's last forward pass");
    }
    const auto G = pixel_matrix(grad_out);
    AeGrads g;
    g.w2 = G.transpose() * cache.activation;
    g.b2 = G.colwise().sum().transpose();
    Eigen::MatrixXd dz = G * params.w2;
    dz.array() *= (cache.pre_activation.array() > 0.0).cast<double>();
    g.w1 = dz.transpose() * cache.input;
    g.b1 = dz.colwise().sum().transpose();
    return g;
}

AdamState AdamState::for_params(const AeParams& params, AdamSettings settings) {
    AdamState s;
    s.settings = settings;
    s.first_moment = AeParams::zeros(params.bands(), params.hidden());
    s.second_moment = s.first_moment;
    return s;
}

void adam_step(AeParams& params, const AeGrads& grads, AdamState& state) {
    if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
        !params.same_shape(state.second_moment)) {
        throw DataError("ADAM step: parameter, gradient and moment shapes differ");
    }
    require_finite(grads.w1, "w1");
    require_finite(grads.b1, "b1");
    require_finite(grads.w2, "w2");
    require_finite(grads.b2, "b2");

    const AdamSettings& s = state.settings;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(s.beta1, t);
    const double c2 = 1.0 - std::pow(s.beta2, t);
    auto& m = state.first_moment;
    auto& v = state.second_moment;
    adam_update(params.w1, grads.w1, m.w1, v.w1, s, c1, c2);
    adam_update(params.b1, grads.b1, m.b1, v.b1, s, c1, c2);
    adam_update(params.w2, grads.w2, m.w2, v.w2, s, c1, c2);
    adam_update(params.b2, grads.b2, m.b2, v.b2, s, c1, c2);
}

void save_checkpoint(const std::filesystem::path& path, const AeParams& params, const AdamState* state) {
    std::string out(kCheckpointMagic, 4);
    detail::append_le(out, static_cast<std::uint32_t>(params.bands()));
    detail::append_le(out, static_cast<std::uint32_t>(params.hidden()));
    append_params(out, params);
    out.push_back(state ? '\1' : '\0');
    if (state) {
        detail::append_le(out, static_cast<std::uint64_t>(state->step));
        detail::append_le(out, state->settings.learning_rate);
        detail::append_le(out, state->settings.beta1);
        detail::append_le(out, state->settings.beta2);
        detail::append_le(out, state->settings.epsilon);
        append_params(out, state->first_moment);
        append_params(out, state->second_moment);
    }
    detail::write_file(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string bytes = detail::read_file(path);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
        throw DataError(path.string() + " is not an autoencoder checkpoint (bad magic)");
    }
    detail::ByteReader in(bytes, path.string());
    in.read<std::uint32_t>();  // magic
    const auto bands = in.read<std::uint32_t>();
    const auto hidden = in.read<std::uint32_t>();
    if (bands == 0 || hidden == 0) throw DataError(path.string() + " declares an empty autoencoder");
    Checkpoint ck{AeParams::zeros(bands, hidden), std::nullopt};
    read_params(in, ck.params);
    const auto flag = in.read<std::uint8_t>();
    if (flag == 1) {
        AdamState s = AdamState::for_params(ck.params);
        s.step = in.read<std::uint64_t>();
        s.settings.learning_rate = in.read<double>();
        s.settings.beta1 = in.read<double>();
        s.settings.beta2 = in.read<double>();
        s.settings.epsilon = in.read<double>();
        read_params(in, s.first_moment);
        read_params(in, s.second_moment);
        ck.state = std::move(s);
    } else if (flag != 0) {
        throw DataError(path.string() + " has an invalid optimizer-state flag");
    }
    if (!in.at_end()) throw DataError(path.string() + " has trailing bytes");
    return ck;
}

VanillaAutoencoder::VanillaAutoencoder(AeParams params, AdamSettings adam)
    : params_(std::move(params)),
      grads_(AeParams::zeros(params_.bands(), params_.hidden())),
      adam_(AdamState::for_params(params_, adam)) {}

VanillaAutoencoder::VanillaAutoencoder(std::size_t bands, std::size_t hidden, std::uint64_t seed,
                                       AdamSettings adam)
    : VanillaAutoencoder(init_params(bands, hidden, seed), adam) {}

HsiCube VanillaAutoencoder::forward(const HsiCube& input) {
    ForwardResult r = ae_forward(params_, input);
    cache_ = std::move(r.cache);
    return std::move(r.output);
}

void VanillaAutoencoder::accumulate_grad(const HsiCube& grad_output) {
    if (!cache_) throw std::logic_error("accumulate_grad called before forward");
    const AeGrads g = ae_backward(params_, *cache_, grad_output);
    grads_.w1 += g.w1;
    grads_.b1 += g.b1;
    grads_.w2 += g.w2;
    grads_.b2 += g.b2;
}

void VanillaAutoencoder::apply_update() {
    adam_step(params_, grads_, adam_);
    zero_grad();
}

void VanillaAutoencoder::zero_grad() {
    grads_ = AeParams::zeros(params_.bands(), params_.hidden());
}

}  // namespace bigset
