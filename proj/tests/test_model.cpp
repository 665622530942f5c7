#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nv/model.hpp"
#include "nv/rng.hpp"

using namespace nv;

namespace {

Eigen::MatrixXd random_block(int rows, int cols, Rng& rng, double scale) {
    Eigen::MatrixXd m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-scale, scale);
    return m;
}

// Scalar forward written independently of the Eigen kernel.
double naive_forward(const Model& m, const Eigen::VectorXd& x, int out_dim) {
    double acc = 0.0;
    for (int h = 0; h < m.width; ++h) {
        double z = m.b1(h);
        for (int j = 0; j < m.d; ++j) z += m.w1(h, j) * x(j);
        acc += m.wa(out_dim, h) * m.rat.eval(z);
    }
    return acc;
}

ModelMeta dummy_meta() {
    ModelMeta meta;
    meta.system = SystemId::ElasticPendulum;
    meta.scheme = Scheme::RK4;
    meta.k = 100;
    meta.fine_dt = 1e-3;
    meta.eta = 1e-1;
    meta.train_seed = 7;
    return meta;
}

}  // namespace

TEST_CASE("zero model outputs exactly zero") {
    Model m = Model::zeros(4, 16);
    StateBatch u(3, 4);
    for (std::size_t i = 0; i < u.data.size(); ++i) u.data[i] = 0.1 * static_cast<double>(i);
    StateBatch out = forward(m, u);
    for (double v : out.data) CHECK(v == 0.0);
    CHECK(m.is_zero_output());
}

TEST_CASE("rational activation value at zero") {
    RationalCoeffs rat;
    CHECK(rat.eval(0.0) == doctest::Approx(0.0218).epsilon(1e-15));
}

TEST_CASE("forward matches a naive per-element evaluation") {
    Model m = Model::init_random(3, 24, 123);
    Rng rng(55);
    Eigen::MatrixXd x = random_block(3, 5, rng, 2.0);
    Eigen::MatrixXd y = forward_cols(m, x);
    for (int c = 0; c < 5; ++c)
        for (int r = 0; r < 3; ++r)
            CHECK(y(r, c) == doctest::Approx(naive_forward(m, x.col(c), r)).epsilon(1e-12));
}

TEST_CASE("forward dimension check") {
    Model m = Model::zeros(4, 8);
    StateBatch wrong(2, 3);
    CHECK_THROWS_WITH_AS(forward(m, wrong), doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("loss is zero when targets equal predictions") {
    Model m = Model::init_random(2, 8, 5);
    Rng rng(6);
    Eigen::MatrixXd x = random_block(2, 7, rng, 1.0);
    Eigen::MatrixXd t = forward_cols(m, x);
    Grads g = Grads::zeros_like(m);
    double loss = loss_and_grads(m, x, t, g);
    CHECK(loss == doctest::Approx(0.0));
    CHECK(g.w1.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(g.wa.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    for (double v : g.a) CHECK(v == doctest::Approx(0.0));
    for (double v : g.b) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("analytic gradients match central finite differences") {
    const double h = 1e-6;
    for (std::uint64_t draw = 0; draw < 10; ++draw) {
        CAPTURE(draw);
        Model m = Model::init_random(3, 6, 1000 + draw);
        Rng rng(2000 + draw);
        Eigen::MatrixXd x = random_block(3, 5, rng, 1.5);
        Eigen::MatrixXd t = random_block(3, 5, rng, 0.5);
        Grads g = Grads::zeros_like(m);
        loss_and_grads(m, x, t, g);

        Grads unused = Grads::zeros_like(m);
        auto fd = [&](double* param) {
            double save = *param;
            *param = save + h;
            double up = loss_and_grads(m, x, t, unused);
            *param = save - h;
            double down = loss_and_grads(m, x, t, unused);
            *param = save;
            return (up - down) / (2.0 * h);
        };
        auto check = [&](double analytic, double numeric) {
            double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-4});
            CHECK(std::fabs(analytic - numeric) / scale < 1e-6);
        };

        for (int r = 0; r < m.w1.rows(); ++r)
            for (int c = 0; c < m.w1.cols(); ++c) check(g.w1(r, c), fd(&m.w1(r, c)));
        for (int r = 0; r < m.b1.size(); ++r) check(g.b1(r), fd(&m.b1(r)));
        for (int r = 0; r < m.wa.rows(); ++r)
            for (int c = 0; c < m.wa.cols(); ++c) check(g.wa(r, c), fd(&m.wa(r, c)));
        for (int i = 0; i < 4; ++i) check(g.a[i], fd(&m.rat.a[i]));
        for (int i = 0; i < 3; ++i) check(g.b[i], fd(&m.rat.b[i]));
    }
}

TEST_CASE("micro-network closed form: one unit, one sample") {
    // y = wa * sigma(w1 x + b1); loss = (y - t)^2 for G=1, d=1.
    Model m = Model::zeros(1, 1);
    m.w1(0, 0) = 0.7;
    m.b1(0) = -0.2;
    m.wa(0, 0) = 1.3;
    Eigen::MatrixXd x(1, 1), t(1, 1);
    x(0, 0) = 0.9;
    t(0, 0) = 0.4;

    double z = 0.7 * 0.9 - 0.2;
    double num = ((m.rat.a[3] * z + m.rat.a[2]) * z + m.rat.a[1]) * z + m.rat.a[0];
    double den = (m.rat.b[2] * z + m.rat.b[1]) * z + m.rat.b[0];
    double sig = num / den;
    double y = 1.3 * sig;
    double want_loss = (y - t(0, 0)) * (y - t(0, 0));

    double dy = 2.0 * (y - t(0, 0));
    double dsig = dy * 1.3;
    double dnum = (3.0 * m.rat.a[3] * z + 2.0 * m.rat.a[2]) * z + m.rat.a[1];
    double dden = 2.0 * m.rat.b[2] * z + m.rat.b[1];
    double dsig_dz = (dnum * den - num * dden) / (den * den);
    double dz = dsig * dsig_dz;

    Grads g = Grads::zeros_like(m);
    double loss = loss_and_grads(m, x, t, g);
    CHECK(loss == doctest::Approx(want_loss).epsilon(1e-14));
    CHECK(g.wa(0, 0) == doctest::Approx(dy * sig).epsilon(1e-14));
    CHECK(g.w1(0, 0) == doctest::Approx(dz * 0.9).epsilon(1e-13));
    CHECK(g.b1(0) == doctest::Approx(dz).epsilon(1e-13));
    CHECK(g.a[0] == doctest::Approx(dsig / den).epsilon(1e-13));
    CHECK(g.a[1] == doctest::Approx(dsig * z / den).epsilon(1e-13));
    CHECK(g.b[0] == doctest::Approx(-dsig * num / (den * den)).epsilon(1e-13));
    CHECK(g.b[1] == doctest::Approx(-dsig * num * z / (den * den)).epsilon(1e-13));
}

TEST_CASE("adam basics") {
    Model m = Model::zeros(1, 1);
    m.w1(0, 0) = 0.5;
    AdamState adam = AdamState::init(m, 1e-3);

    SUBCASE("zero gradients leave parameters untouched") {
        Grads g = Grads::zeros_like(m);
        adam_step(m, adam, g);
        CHECK(m.w1(0, 0) == 0.5);
        CHECK(adam.t == 1);
    }
    SUBCASE("first step with unit gradient moves by about lr") {
        Grads g = Grads::zeros_like(m);
        g.w1(0, 0) = 1.0;
        adam_step(m, adam, g);
        // Bias-corrected first step: lr * g / (|g| + eps).
        CHECK(m.w1(0, 0) == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
    }
}

TEST_CASE("adam descends a quadratic") {
    // Minimize (w1 - 2)^2 through manual gradients on the w1 slot.
    Model m = Model::zeros(1, 1);
    m.w1(0, 0) = 0.0;
    AdamState adam = AdamState::init(m, 0.05);
    double prev = (m.w1(0, 0) - 2.0) * (m.w1(0, 0) - 2.0);
    for (int i = 0; i < 100; ++i) {
        Grads g = Grads::zeros_like(m);
        g.w1(0, 0) = 2.0 * (m.w1(0, 0) - 2.0);
        adam_step(m, adam, g);
    }
    double now = (m.w1(0, 0) - 2.0) * (m.w1(0, 0) - 2.0);
    CHECK(now < prev * 0.1);
}

TEST_CASE("denominator positivity projection") {
    RationalCoeffs rat;
    rat.b = {0.5, 3.0, 0.2};  // discriminant violated, b2 below floor
    project_rational(rat);
    CHECK(rat.b[2] >= 1e-3);
    CHECK(rat.b[1] * rat.b[1] < 4.0 * rat.b[2] * rat.b[0]);
    // eval stays finite over a wide range
    for (double x = -50.0; x <= 50.0; x += 0.25) CHECK(std::isfinite(rat.eval(x)));
}

TEST_CASE("forward is smooth under tiny input perturbations") {
    Model m = Model::init_random(4, 64, 77);
    StateBatch u(1, 4);
    u.data = {0.4, 9.7, -0.1, 0.2};
    StateBatch base = forward(m, u);
    StateBatch shifted = u;
    for (double& v : shifted.data) v += 1e-9;
    StateBatch out = forward(m, shifted);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(out.data[j] - base.data[j]) < 1e-6);
}

TEST_CASE("model persistence round-trips bitwise") {
    Model m = Model::init_random(4, 32, 31, dummy_meta());
    m.rat.a[0] = 0.1234567890123456789;
    std::string path = (std::filesystem::temp_directory_path() / "nv_model_rt.nvec").string();
    save_model(m, path);
    Model r = load_model(path);
    CHECK(r.d == m.d);
    CHECK(r.width == m.width);
    CHECK(r.w1 == m.w1);
    CHECK(r.b1 == m.b1);
    CHECK(r.wa == m.wa);
    CHECK(r.rat.a == m.rat.a);
    CHECK(r.rat.b == m.rat.b);
    CHECK(r.meta.system == m.meta.system);
    CHECK(r.meta.scheme == m.meta.scheme);
    CHECK(r.meta.k == m.meta.k);
    CHECK(r.meta.fine_dt == m.meta.fine_dt);
    CHECK(r.meta.eta == m.meta.eta);
    CHECK(r.meta.train_seed == m.meta.train_seed);
    std::filesystem::remove(path);
}

TEST_CASE("corrupted model payload is rejected") {
    Model m = Model::init_random(2, 8, 3, dummy_meta());
    std::string path = (std::filesystem::temp_directory_path() / "nv_model_bad.nvec").string();
    save_model(m, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        char byte;
        f.seekg(64);
        f.get(byte);
        byte ^= 0x40;
        f.seekp(64);
        f.put(byte);
    }
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("ChecksumMismatch"), Error);
    std::filesystem::remove(path);
}

TEST_CASE("future model format version is rejected by name") {
    Model m = Model::init_random(2, 8, 3, dummy_meta());
    std::string path = (std::filesystem::temp_directory_path() / "nv_model_ver.nvec").string();
    save_model(m, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);  // version field follows the 4-byte magic
        std::uint32_t v = 99;
        f.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    try {
        load_model(path);
        FAIL("expected FormatVersionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::FormatVersionMismatch);
        std::string msg = e.what();
        CHECK(msg.find("99") != std::string::npos);
        CHECK(msg.find('1') != std::string::npos);
    }
    std::filesystem::remove(path);
}
