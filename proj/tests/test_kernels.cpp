#include "doctest.h"

#include <omp.h>

#include <numeric>

#include "tising/design.hpp"
#include "tising/generators.hpp"
#include "tising/kernels.hpp"
#include "tising/sampler.hpp"

using namespace tising;
namespace ks = kernels::serial;
namespace kp = kernels::parallel;

namespace {

struct Data {
    SampleMatrix samples;
    NodeDesign design;
    FeatureMatrix dense, implicit;
    Data(int p, int n)
        : samples(make(p, n)), design(p, 3, 1), dense(samples, design), implicit(samples, design, 0) {}
    static SampleMatrix make(int p, int n) {
        GibbsConfig g;
        g.burn_in_sweeps = 20;
        g.spacing_sweeps = 1;
        g.seed = 4;
        return draw_samples(assign_coefficients(regular_hypergraph(p, 3, 3, 2)), n, g);
    }
};

} // namespace

TEST_CASE("feature matrix: materialized and implicit rows agree") {
    const Data d(12, 700);
    CHECK(d.dense.materialized());
    CHECK_FALSE(d.implicit.materialized());
    std::vector<Spin> scratch(d.dense.cols());
    for (int i = 0; i < d.dense.rows(); i += 37)
        for (int j = 0; j < d.dense.cols(); ++j) {
            const auto& f = d.design.feature(j);
            CHECK(d.dense.at(i, j) == d.samples.at(i, f[0]) * d.samples.at(i, f[1]));
            CHECK(d.implicit.row(i, scratch.data())[j] == d.dense.at(i, j));
        }
}

TEST_CASE("serial and OpenMP kernels agree") {
    const Data d(20, 5000);
    Rng rng(3);
    std::vector<double> theta(d.dense.cols()), w(d.dense.rows());
    for (auto& t : theta) t = rng.uniform() - 0.5;
    for (auto& x : w) x = rng.uniform() - 0.5;
    std::vector<int> active;
    for (int j = 0; j < d.dense.cols(); j += 3) active.push_back(j);

    for (const FeatureMatrix* z : {&d.dense, &d.implicit}) {
        std::vector<double> a(z->rows()), b(z->rows());
        ks::margins(*z, theta, active, a);
        kp::margins(*z, theta, active, b);
        CHECK(a == b);

        std::vector<double> ga(z->cols()), gb(z->cols());
        ks::gradient(*z, w, ga);
        kp::gradient(*z, w, gb);
        CHECK(ga == gb);

        // Reductions are chunked in the OpenMP version, so only rounding differs.
        CHECK(ks::logistic_loss(a, z->labels()) == doctest::Approx(kp::logistic_loss(b, z->labels())).epsilon(1e-14));

        std::vector<int> rows{0, 5, 9, 40}, cols{1, 2};
        std::vector<double> ca(8), cb(8);
        ks::weighted_cross(*z, w, rows, cols, ca);
        kp::weighted_cross(*z, w, rows, cols, cb);
        CHECK(ca == cb);
    }
    CHECK(ks::ordered_sum(w) == doctest::Approx(kp::ordered_sum(w)).epsilon(1e-13));

    const auto t = assign_coefficients(regular_hypergraph(15, 3, 3, 8));
    std::vector<double> ha(1 << 15), hb(1 << 15);
    ks::state_hamiltonians(t, ha);
    kp::state_hamiltonians(t, hb);
    CHECK(ha == hb);
    CHECK(ha[12345] == doctest::Approx(hamiltonian(t, SpinConfiguration::from_index(12345, 15))).epsilon(1e-14));
}

TEST_CASE("OpenMP results do not depend on the thread count") {
    const Data d(20, 9000);
    Rng rng(5);
    std::vector<double> theta(d.dense.cols()), w(d.dense.rows());
    for (auto& t : theta) t = rng.uniform() - 0.5;
    for (auto& x : w) x = rng.uniform() - 0.5;
    std::vector<int> all(d.dense.cols());
    std::iota(all.begin(), all.end(), 0);
    auto run = [&](int threads) {
        omp_set_num_threads(threads);
        std::vector<double> m(d.dense.rows()), g(d.dense.cols());
        kp::margins(d.dense, theta, all, m);
        kp::gradient(d.dense, w, g);
        m.push_back(kp::logistic_loss(m, d.dense.labels()));
        m.push_back(kp::ordered_sum(w));
        m.insert(m.end(), g.begin(), g.end());
        return m;
    };
    const auto one = run(1);
    const auto four = run(4);
    omp_set_num_threads(omp_get_num_procs());
    CHECK(one == four);
}

TEST_CASE("softplus is stable") {
    CHECK(kernels::softplus(800.0) == doctest::Approx(800.0));
    CHECK(kernels::softplus(-800.0) >= 0.0);
    CHECK(kernels::softplus(0.0) == doctest::Approx(std::log(2.0)));
}
