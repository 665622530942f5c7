#include "nv/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nv/io.hpp"
#include "nv/rng.hpp"

namespace nv {

void project_rational(RationalCoeffs& rat) {
    if (rat.b[2] <= 1e-3) rat.b[2] = 1e-3;
    if (rat.b[0] <= 1e-3) rat.b[0] = 1e-3;  // same floor; a non-positive b0 admits real roots
    while (rat.b[1] * rat.b[1] >= 4.0 * rat.b[2] * rat.b[0] * (1.0 - 1e-6)) {
        rat.b[1] *= 0.5;
        if (std::fabs(rat.b[1]) < 1e-300) {
            rat.b[1] = 0.0;
            break;
        }
    }
}

Model Model::zeros(int d, int width, const ModelMeta& meta) {
    Model m;
    m.d = d;
    m.width = width;
    m.w1 = Eigen::MatrixXd::Zero(width, d);
    m.b1 = Eigen::VectorXd::Zero(width);
    m.wa = Eigen::MatrixXd::Zero(d, width);
    m.meta = meta;
    return m;
}

Model Model::init_random(int d, int width, std::uint64_t seed, const ModelMeta& meta) {
    Model m = zeros(d, width, meta);
    Rng rng(seed);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
    const double sa = 1.0 / std::sqrt(static_cast<double>(width));
    for (int r = 0; r < width; ++r)
        for (int c = 0; c < d; ++c) m.w1(r, c) = rng.uniform(-s1, s1);
    for (int r = 0; r < width; ++r) m.b1(r) = rng.uniform(-s1, s1);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < width; ++c) m.wa(r, c) = rng.uniform(-sa, sa);
    return m;
}

namespace {

// Inference runs inside tight integration loops; the hidden-layer block is
// processed in column chunks that stay cache-resident, with the rational
// activation fused into a single in-place pass. The workspace persists across
// calls so steady-state inference does not allocate.
constexpr Eigen::Index kForwardChunk = 512;

void forward_cols_into(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       Eigen::MatrixXd& y) {
    require(x.rows() == model.d, Errc::DimensionMismatch,
            "input dimension does not match model");
    const auto& a = model.rat.a;
    const auto& b = model.rat.b;
    const Eigen::Index cols = x.cols();
    y.resize(model.d, cols);
    thread_local Eigen::MatrixXd z;
    for (Eigen::Index c0 = 0; c0 < cols; c0 += kForwardChunk) {
        const Eigen::Index nc = std::min(kForwardChunk, cols - c0);
        z.resize(model.width, nc);
        z.noalias() = model.w1 * x.middleCols(c0, nc);
        z.colwise() += model.b1;
        auto za = z.array();
        za = (((a[3] * za + a[2]) * za + a[1]) * za + a[0]) /
             ((b[2] * za + b[1]) * za + b[0]);
        y.middleCols(c0, nc).noalias() = model.wa * z;
    }
}

}  // namespace

Eigen::MatrixXd forward_cols(const Model& model, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y;
    forward_cols_into(model, x, y);
    return y;
}

void forward_into(const Model& model, const StateBatch& states, StateBatch& out) {
    require(states.d == static_cast<std::size_t>(model.d), Errc::DimensionMismatch,
            "state dimension does not match model");
    if (!out.same_shape(states)) out = StateBatch(states.n, states.d);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> xt(
        states.data.data(), static_cast<Eigen::Index>(states.n),
        static_cast<Eigen::Index>(states.d));
    thread_local Eigen::MatrixXd xcols, y;
    xcols = xt.transpose();
    forward_cols_into(model, xcols, y);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> yt(
        out.data.data(), static_cast<Eigen::Index>(out.n), static_cast<Eigen::Index>(out.d));
    yt = y.transpose();
}

StateBatch forward(const Model& model, const StateBatch& states) {
    StateBatch out(states.n, states.d);
    forward_into(model, states, out);
    return out;
}

Grads Grads::zeros_like(const Model& m) {
    Grads g;
    g.w1 = Eigen::MatrixXd::Zero(m.width, m.d);
    g.b1 = Eigen::VectorXd::Zero(m.width);
    g.wa = Eigen::MatrixXd::Zero(m.d, m.width);
    return g;
}

double loss_and_grads(const Model& model, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& targets, Grads& grads) {
    require(inputs.rows() == model.d && targets.rows() == model.d &&
                inputs.cols() == targets.cols(),
            Errc::ShapeMismatch, "input/target shapes do not match model");
    const double g_count = static_cast<double>(inputs.cols());
    const auto& a = model.rat.a;
    const auto& b = model.rat.b;

    // Workspaces persist across calls: the mini-batch loop calls this once per
    // step and per-call allocation of width x G blocks dominates otherwise.
    thread_local Eigen::ArrayXXd za, p, q, q_inv, h, dh, tmp;
    thread_local Eigen::MatrixXd resid, dz;

    za = (model.w1 * inputs).colwise() + model.b1;
    p = ((a[3] * za + a[2]) * za + a[1]) * za + a[0];
    q = (b[2] * za + b[1]) * za + b[0];
    q_inv = q.inverse();
    h = p * q_inv;
    resid.noalias() = model.wa * h.matrix();
    resid -= targets;

    double loss = resid.squaredNorm() / g_count;

    resid *= 2.0 / g_count;  // now dL/dy
    grads.wa.noalias() = resid * h.matrix().transpose();
    dh.resize(za.rows(), za.cols());
    dh.matrix().noalias() = model.wa.transpose() * resid;

    // sigma' = (p' q - p q') / q^2
    tmp = (((3.0 * a[3] * za + 2.0 * a[2]) * za + a[1]) * q - p * (2.0 * b[2] * za + b[1])) *
          q_inv * q_inv;
    dz = (dh * tmp).matrix();

    grads.w1.noalias() = dz * inputs.transpose();
    grads.b1 = dz.rowwise().sum();

    // Rational coefficients (layer-shared): reduce over every activation site.
    tmp = dh * q_inv;
    grads.a[0] = tmp.sum();
    grads.a[1] = (tmp * za).sum();
    grads.a[2] = (tmp * za * za).sum();
    grads.a[3] = (tmp * za * za * za).sum();
    tmp *= p * q_inv;
    grads.b[0] = -tmp.sum();
    grads.b[1] = -(tmp * za).sum();
    grads.b[2] = -(tmp * za * za).sum();

    return loss;
}

AdamState AdamState::init(const Model& m, double lr) {
    AdamState s;
    s.lr = lr;
    s.m_w1 = Eigen::MatrixXd::Zero(m.width, m.d);
    s.v_w1 = Eigen::MatrixXd::Zero(m.width, m.d);
    s.m_b1 = Eigen::VectorXd::Zero(m.width);
    s.v_b1 = Eigen::VectorXd::Zero(m.width);
    s.m_wa = Eigen::MatrixXd::Zero(m.d, m.width);
    s.v_wa = Eigen::MatrixXd::Zero(m.d, m.width);
    return s;
}

namespace {

template <class Mat>
void adam_update(Mat& param, Mat& m, Mat& v, const Mat& g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = (beta2 * v.array() + (1.0 - beta2) * g.array().square()).matrix();
    param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

void adam_update_scalar(double& param, double& m, double& v, double g, double lr, double beta1,
                        double beta2, double eps, double bc1, double bc2) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    param -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
}

}  // namespace

void adam_step(Model& model, AdamState& adam, const Grads& grads, double lr_scale) {
    adam.t += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.t));
    const double lr = adam.lr * lr_scale;
    adam_update(model.w1, adam.m_w1, adam.v_w1, grads.w1, lr, adam.beta1, adam.beta2, adam.eps,
                bc1, bc2);
    adam_update(model.b1, adam.m_b1, adam.v_b1, grads.b1, lr, adam.beta1, adam.beta2, adam.eps,
                bc1, bc2);
    adam_update(model.wa, adam.m_wa, adam.v_wa, grads.wa, lr, adam.beta1, adam.beta2, adam.eps,
                bc1, bc2);
    for (int i = 0; i < 4; ++i)
        adam_update_scalar(model.rat.a[i], adam.m_a[i], adam.v_a[i], grads.a[i], lr, adam.beta1,
                           adam.beta2, adam.eps, bc1, bc2);
    for (int i = 0; i < 3; ++i)
        adam_update_scalar(model.rat.b[i], adam.m_b[i], adam.v_b[i], grads.b[i], lr, adam.beta1,
                           adam.beta2, adam.eps, bc1, bc2);
    project_rational(model.rat);
}

namespace {

constexpr char kModelMagic[4] = {'N', 'V', 'E', 'C'};
constexpr std::uint32_t kModelVersion = 1;

std::string meta_to_text(const Model& m) {
    std::ostringstream os;
    os << "system " << system_name(m.meta.system) << "\n"
       << "scheme " << scheme_name(m.meta.scheme) << "\n"
       << "k " << m.meta.k << "\n"
       << "fine_dt " << f64_to_text(m.meta.fine_dt) << "\n"
       << "eta " << f64_to_text(m.meta.eta) << "\n"
       << "train_seed " << m.meta.train_seed << "\n"
       << "d " << m.d << "\n"
       << "width " << m.width << "\n";
    return os.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto pos = line.find(' ');
        require(pos != std::string::npos, Errc::ConfigParse, "malformed metadata line: " + line);
        kv[line.substr(0, pos)] = line.substr(pos + 1);
    }
    return kv;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::MissingInput, "cannot open for writing: " + path);
    BinWriter w(out);
    w.bytes(kModelMagic, 4);
    w.u32(kModelVersion);
    w.text_block(meta_to_text(model));
    for (int r = 0; r < model.width; ++r)
        for (int c = 0; c < model.d; ++c) w.f64(model.w1(r, c));
    for (int r = 0; r < model.width; ++r) w.f64(model.b1(r));
    for (int r = 0; r < model.d; ++r)
        for (int c = 0; c < model.width; ++c) w.f64(model.wa(r, c));
    for (double v : model.rat.a) w.f64(v);
    for (double v : model.rat.b) w.f64(v);
    w.checksum_trailer();
    require(out.good(), Errc::Internal, "write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::MissingInput, "cannot open " + path);
    BinReader r(in);
    char magic[4];
    r.bytes(magic, 4);
    require(std::memcmp(magic, kModelMagic, 4) == 0, Errc::FormatVersionMismatch,
            "not a model file: " + path);
    std::uint32_t version = r.u32();
    require(version == kModelVersion, Errc::FormatVersionMismatch,
            "model format version " + std::to_string(version) + ", expected " +
                std::to_string(kModelVersion));
    verify_file_checksum(path);
    auto kv = parse_kv(r.text_block());
    ModelMeta meta;
    meta.system = system_from_name(kv.at("system"));
    meta.scheme = scheme_from_name(kv.at("scheme"));
    meta.k = std::stoi(kv.at("k"));
    meta.fine_dt = f64_from_text(kv.at("fine_dt"));
    meta.eta = f64_from_text(kv.at("eta"));
    meta.train_seed = std::stoull(kv.at("train_seed"));
    int d = std::stoi(kv.at("d"));
    int width = std::stoi(kv.at("width"));
    Model m = Model::zeros(d, width, meta);
    for (int row = 0; row < width; ++row)
        for (int c = 0; c < d; ++c) m.w1(row, c) = r.f64();
    for (int row = 0; row < width; ++row) m.b1(row) = r.f64();
    for (int row = 0; row < d; ++row)
        for (int c = 0; c < width; ++c) m.wa(row, c) = r.f64();
    for (double& v : m.rat.a) v = r.f64();
    for (double& v : m.rat.b) v = r.f64();
    r.verify_checksum_trailer();
    return m;
}

}  // namespace nv
