#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nv/solvers.hpp"
#include "nv/systems.hpp"

using namespace nv;

namespace {

StateBatch single(std::initializer_list<double> vals) {
    StateBatch b(1, vals.size());
    std::copy(vals.begin(), vals.end(), b.data.begin());
    return b;
}

double spring_energy(const SpringChainParams& p, std::span<const double> state) {
    const std::size_t d = p.count();
    double e = 0.0;
    for (std::size_t i = 0; i < d; ++i) e += state[d + i] * state[d + i] / (2.0 * p.masses[i]);
    for (std::size_t i = 0; i <= d; ++i) {
        double left = i == 0 ? 0.0 : state[i - 1];
        double right = i == d ? 0.0 : state[i];
        e += 0.5 * p.stiffness[i] * (right - left) * (right - left);
    }
    return e;
}

}  // namespace

TEST_CASE("henon-heiles origin is a fixed point") {
    System sys = System::henon_heiles();
    StateBatch out = sys.rhs(single({0, 0, 0, 0}));
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("spring chain d=1 closed form") {
    SpringChainParams p;
    p.masses = {1.0};
    p.stiffness = {1.0, 1.0};
    System sys = System::spring_chain(p);
    StateBatch out = sys.rhs(single({1.0, 0.0}));
    CHECK(out.at(0, 0) == doctest::Approx(0.0));
    CHECK(out.at(0, 1) == doctest::Approx(-2.0));
}

TEST_CASE("two-link rhs matches a Cramer's-rule solve") {
    System sys = System::klink_pendulum(2);
    const double th1 = 0.1, th2 = 0.2, w1 = 0.3, w2 = -0.4, g = 9.8;
    StateBatch out = sys.rhs(single({th1, th2, w1, w2}));

    // Build the 2x2 system of the angular accelerations by hand.
    double a11 = 2.0, a22 = 1.0;
    double a12 = std::cos(th1 - th2);
    double b1 = -w2 * w2 * std::sin(th1 - th2) - 2.0 * g * std::sin(th1);
    double b2 = -w1 * w1 * std::sin(th2 - th1) - g * std::sin(th2);
    double det = a11 * a22 - a12 * a12;
    double acc1 = (b1 * a22 - a12 * b2) / det;
    double acc2 = (a11 * b2 - b1 * a12) / det;

    CHECK(out.at(0, 0) == doctest::Approx(w1));
    CHECK(out.at(0, 1) == doctest::Approx(w2));
    CHECK(out.at(0, 2) == doctest::Approx(acc1).epsilon(1e-12));
    CHECK(out.at(0, 3) == doctest::Approx(acc2).epsilon(1e-12));
}

TEST_CASE("klink_matrix K=2 at rest") {
    KLinkPendulumParams p;
    p.links = 2;
    std::vector<double> theta{0.0, 0.0}, omega{0.0, 0.0}, a, b;
    klink_matrix(p, theta, omega, a, b);
    CHECK(a[0] == doctest::Approx(2.0));
    CHECK(a[1] == doctest::Approx(1.0));
    CHECK(a[2] == doctest::Approx(1.0));
    CHECK(a[3] == doctest::Approx(1.0));
    CHECK(b[0] == doctest::Approx(0.0));
    CHECK(b[1] == doctest::Approx(0.0));
}

TEST_CASE("klink_matrix K=3 matches brute-force construction and is symmetric") {
    KLinkPendulumParams p;
    p.links = 3;
    std::vector<double> theta{0.7, -0.3, 1.1}, omega{0.2, -0.5, 0.9}, a, b;
    klink_matrix(p, theta, omega, a, b);

    const int K = 3;
    auto c = [&](int i, int j) { return static_cast<double>(K - std::max(i, j) + 1); };
    for (int i = 1; i <= K; ++i) {
        double bi = 0.0;
        for (int j = 1; j <= K; ++j) {
            double aij = c(i, j) * std::cos(theta[i - 1] - theta[j - 1]);
            CHECK(a[(i - 1) * K + (j - 1)] == doctest::Approx(aij).epsilon(1e-15));
            bi -= c(i, j) * omega[j - 1] * omega[j - 1] * std::sin(theta[i - 1] - theta[j - 1]);
        }
        bi -= static_cast<double>(K - i + 1) * p.g * std::sin(theta[i - 1]);
        CHECK(b[i - 1] == doctest::Approx(bi).epsilon(1e-14));
        for (int j = 1; j <= K; ++j)
            CHECK(a[(i - 1) * K + (j - 1)] == a[(j - 1) * K + (i - 1)]);
    }
}

TEST_CASE("singular solve is rejected") {
    std::vector<double> a{1.0, 2.0, 2.0, 4.0};  // rank 1
    std::vector<double> b{1.0, 2.0};
    CHECK_THROWS_WITH_AS(solve_dense_inplace(a, b, 2), doctest::Contains("SingularMassMatrix"),
                         Error);
}

TEST_CASE("rhs is row-independent under permutation") {
    System sys = System::elastic_pendulum();
    StateBatch batch = sys.sample_initial(5, 42);
    StateBatch out = sys.rhs(batch);
    StateBatch swapped = batch;
    for (std::size_t j = 0; j < batch.d; ++j) std::swap(swapped.at(0, j), swapped.at(3, j));
    StateBatch out2 = sys.rhs(swapped);
    for (std::size_t j = 0; j < batch.d; ++j) {
        CHECK(out2.at(0, j) == out.at(3, j));
        CHECK(out2.at(3, j) == out.at(0, j));
    }
}

TEST_CASE("henon-heiles energy basics") {
    System sys = System::henon_heiles();
    CHECK(sys.energy(single({0, 0, 0, 0}))[0] == doctest::Approx(0.0));
    CHECK(sys.energy(single({0, 0, 1, 0}))[0] == doctest::Approx(0.5));
    CHECK_THROWS_WITH_AS(System::elastic_pendulum().energy(single({0, 10, 0, 0})),
                         doctest::Contains("UnsupportedSystem"), Error);
}

TEST_CASE("henon-heiles reference-step energy drift stays below 1e-8 over T=50") {
    System sys = System::henon_heiles();
    StateBatch init = sys.sample_initial(3, 7);
    IntegrationPlan plan{1e-4, 500000, 5000};
    Trajectory traj = integrate(Scheme::RK4, sys, init, plan);
    std::vector<double> e0 = sys.energy(init);
    for (std::size_t s = 0; s < traj.samples; ++s) {
        std::vector<double> e = sys.energy(traj.batch_at(s));
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::fabs(e[i] - e0[i]) < 1e-8);
    }
}

TEST_CASE("spring-chain energy drift stays below 1e-6 over T=20") {
    System sys = System::spring_chain();
    const auto& p = sys.spring_chain_params();
    StateBatch init = sys.sample_initial(2, 11);
    IntegrationPlan plan{1e-4, 200000, 20000};
    Trajectory traj = integrate(Scheme::RK4, sys, init, plan);
    std::vector<double> e0;
    for (std::size_t i = 0; i < init.n; ++i) e0.push_back(spring_energy(p, init.row(i)));
    for (std::size_t s = 0; s < traj.samples; ++s) {
        StateBatch b = traj.batch_at(s);
        for (std::size_t i = 0; i < b.n; ++i)
            CHECK(std::fabs(spring_energy(p, b.row(i)) - e0[i]) < 1e-6);
    }
}

TEST_CASE("initial-state distributions") {
    SUBCASE("elastic pendulum") {
        System sys = System::elastic_pendulum();
        StateBatch b = sys.sample_initial(200, 3);
        for (std::size_t i = 0; i < b.n; ++i) {
            CHECK(b.at(i, 0) >= 0.0);
            CHECK(b.at(i, 0) <= std::numbers::pi / 8);
            CHECK(b.at(i, 1) == 10.0);
            CHECK(b.at(i, 2) == 0.0);
            CHECK(b.at(i, 3) == 0.0);
        }
    }
    SUBCASE("henon-heiles energy window") {
        System sys = System::henon_heiles();
        StateBatch b = sys.sample_initial(200, 3);
        std::vector<double> e = sys.energy(b);
        for (double h : e) {
            CHECK(h >= 1.0 / 12.0);
            CHECK(h <= 1.0 / 6.0);
        }
    }
    SUBCASE("spring chain range") {
        System sys = System::spring_chain();
        StateBatch b = sys.sample_initial(50, 3);
        CHECK(b.d == 40);
        for (double v : b.data) {
            CHECK(v >= -2.5);
            CHECK(v <= 2.5);
        }
    }
    SUBCASE("one-link ranges") {
        System sys = System::klink_pendulum(1);
        StateBatch b = sys.sample_initial(100, 9);
        for (std::size_t i = 0; i < b.n; ++i) {
            CHECK(b.at(i, 0) >= 0.0);
            CHECK(b.at(i, 0) <= std::numbers::pi / 2);
            CHECK(b.at(i, 1) >= 0.0);
            CHECK(b.at(i, 1) <= 0.5);
        }
    }
}

TEST_CASE("sampling is deterministic per (system, count, seed)") {
    System sys = System::henon_heiles();
    StateBatch a = sys.sample_initial(64, 1234);
    StateBatch b = sys.sample_initial(64, 1234);
    CHECK(a.data == b.data);
    StateBatch c = sys.sample_initial(64, 1235);
    CHECK(a.data != c.data);
}
