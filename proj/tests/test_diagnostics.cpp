#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "tising/design.hpp"
#include "tising/diagnostics.hpp"
#include "tising/errors.hpp"
#include "tising/sampler.hpp"

using namespace tising;

namespace {

// Full Fisher matrix over T_r by direct summation, indexed like NodeDesign.
std::vector<double> dense_fisher(const InteractionTensor& t, int r) {
    const NodeDesign design(t.p(), t.k(), r);
    const int N = design.size();
    const auto probs = oracle::distribution(t);
    const double kf = oracle::fact(t.k());
    std::vector<double> q(std::size_t(N) * N, 0.0);
    for (std::uint64_t s = 0; s < probs.size(); ++s) {
        const auto x = oracle::decode(s, t.p());
        const double m = local_field(t, x, r);
        const double w = probs[s] * kf * kf / std::pow(std::cosh(t.k() * m), 2);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                double za = 1, zb = 1;
                for (int v : design.feature(a)) za *= x[v];
                for (int v : design.feature(b)) zb *= x[v];
                q[a * N + b] += w * za * zb;
            }
    }
    return q;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

} // namespace

TEST_CASE("eta") {
    const InteractionTensor t(5, 3, {{{0, 1, 2}, 0.2}, {{0, 3, 4}, -0.1}});
    const SpinConfiguration x(std::vector<Spin>{1, -1, 1, 1, 1});
    CHECK(eta_from_field(3, 0.0) == 36.0);
    const double m = local_field(t, x, 0);
    CHECK(eta(t, x, 0) == doctest::Approx(36.0 / std::pow(std::cosh(3 * m), 2)).epsilon(1e-12));
    auto y = x;
    y.flip(0);
    CHECK(eta(t, y, 0) == eta(t, x, 0));
    const double a = 3 * x[0] * m;
    CHECK(eta(t, x, 0) == doctest::Approx(4 * 36 * std::exp(2 * a) / std::pow(std::exp(2 * a) + 1, 2)).epsilon(1e-12));
    CHECK(eta_from_field(3, 1e4) >= 0.0);
    CHECK(eta_from_field(3, 1e4) < 1e-300);
}

TEST_CASE("independence closed forms") {
    for (int k : {2, 3}) {
        const InteractionTensor zero(6, k);
        const NodeDesign design(6, k, 0);
        const auto fb = population_fisher(zero, 0, design.features());
        const double kf2 = std::pow(factorial(k), 2);
        for (int i = 0; i < fb.q_ss.rows(); ++i)
            for (int j = 0; j < fb.q_ss.cols(); ++j) CHECK(std::abs(fb.q_ss(i, j) - (i == j ? kf2 : 0.0)) < 1e-12);
        const auto dc = dependency_constants(fb, zero);
        CHECK(dc.c_min == doctest::Approx(kf2).epsilon(1e-12));
        CHECK(dc.d_max == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(incoherence(fb) == 0.0);

        const std::vector<Subset> two{design.feature(0), design.feature(1)};
        CHECK(incoherence(population_fisher(zero, 0, two)) < 1e-12);
    }
}

TEST_CASE("single edge: Q_SS is (k!)^2 E[sech^2(k m_r)]") {
    const InteractionTensor t(6, 3, {{{0, 2, 4}, 0.35}});
    const auto probs = oracle::distribution(t);
    double expect = 0.0;
    for (std::uint64_t s = 0; s < 64; ++s) {
        const auto x = oracle::decode(s, 6);
        const double m = 2.0 * 0.35 * x[2] * x[4];
        expect += probs[s] * 36.0 / std::pow(std::cosh(3.0 * m), 2);
    }
    const auto fb = population_fisher(t, 0);
    REQUIRE(fb.q_ss.rows() == 1);
    CHECK(fb.q_ss(0, 0) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(fb.support == std::vector<Subset>{{2, 4}});
    CHECK(fb.complement.size() == 9);
}

TEST_CASE("population Fisher blocks and constants match dense oracles") {
    Rng rng(4);
    for (int trial = 0; trial < 4; ++trial) {
        const auto t = oracle::random_tensor(6, 3, 0.3, rng);
        const int r = trial;
        if (t.incident(r).empty()) continue;
        const auto q = dense_fisher(t, r);
        const auto fb = population_fisher(t, r);
        const NodeDesign design(6, 3, r);
        const int N = design.size();
        std::vector<int> s_idx, c_idx;
        for (const auto& s : fb.support) s_idx.push_back(design.index_of(s));
        for (const auto& s : fb.complement) c_idx.push_back(design.index_of(s));
        for (std::size_t a = 0; a < s_idx.size(); ++a)
            for (std::size_t b = 0; b < s_idx.size(); ++b)
                CHECK(std::abs(fb.q_ss(a, b) - q[s_idx[a] * N + s_idx[b]]) < 1e-12);
        for (std::size_t a = 0; a < c_idx.size(); ++a)
            for (std::size_t b = 0; b < s_idx.size(); ++b)
                CHECK(std::abs(fb.q_scs(a, b) - q[c_idx[a] * N + s_idx[b]]) < 1e-12);
        CHECK(asymmetry(fb.q_ss) == 0.0);

        // Incoherence through an explicit inverse.
        const int d = static_cast<int>(s_idx.size());
        std::vector<double> qss(d * d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) qss[a * d + b] = fb.q_ss(a, b);
        const auto inv = oracle::inverse(qss, d);
        double inc = 0.0;
        for (int a = 0; a < fb.q_scs.rows(); ++a) {
            double row = 0.0;
            for (int b = 0; b < d; ++b) {
                double v = 0.0;
                for (int c = 0; c < d; ++c) v += fb.q_scs(a, c) * inv[c * d + b];
                row += std::abs(v);
            }
            inc = std::max(inc, row);
        }
        CHECK(incoherence(fb) == doctest::Approx(inc).epsilon(1e-10));
        CHECK(min_fisher_eigenvalue(fb) == doctest::Approx(oracle::eigenvalues(qss, d).front()).epsilon(1e-10));

        // D_max against the dense covariance spectrum.
        const auto probs = oracle::distribution(t);
        std::vector<double> cov(std::size_t(N) * N, 0.0);
        for (std::uint64_t s = 0; s < probs.size(); ++s) {
            const auto x = oracle::decode(s, 6);
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) {
                    double za = 1, zb = 1;
                    for (int v : design.feature(a)) za *= x[v];
                    for (int v : design.feature(b)) zb *= x[v];
                    cov[a * N + b] += probs[s] * za * zb;
                }
        }
        CHECK(population_d_max(t, r) == doctest::Approx(oracle::eigenvalues(cov, N).back()).epsilon(1e-6));
    }
}

TEST_CASE("two disjoint edges: incoherence by factorization and by inverse agree") {
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.3}, {{0, 3, 4}, -0.25}});
    const auto fb = population_fisher(t, 0);
    REQUIRE(fb.q_ss.rows() == 2);
    std::vector<double> qss{fb.q_ss(0, 0), fb.q_ss(0, 1), fb.q_ss(1, 0), fb.q_ss(1, 1)};
    const auto inv = oracle::inverse(qss, 2);
    double inc = 0.0;
    for (int a = 0; a < fb.q_scs.rows(); ++a) {
        double row = 0.0;
        for (int b = 0; b < 2; ++b) row += std::abs(fb.q_scs(a, 0) * inv[b] + fb.q_scs(a, 1) * inv[2 + b]);
        inc = std::max(inc, row);
    }
    CHECK(std::abs(incoherence(fb) - inc) < 1e-10);
}

TEST_CASE("2x2 closed form for C_min") {
    FisherBlocks fb;
    fb.q_ss = Matrix(2, 2);
    fb.q_ss(0, 0) = fb.q_ss(1, 1) = 3.0;
    fb.q_ss(0, 1) = fb.q_ss(1, 0) = -1.25;
    CHECK(min_fisher_eigenvalue(fb) == doctest::Approx(1.75).epsilon(1e-12));
    fb.q_ss(0, 1) = fb.q_ss(1, 0) = 3.0;
    fb.q_scs = Matrix(1, 2, 1.0);
    CHECK_THROWS_AS(incoherence(fb), DiagnosticError);
}

TEST_CASE("sample Fisher blocks") {
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.3}});
    const auto big = exact_sample(t, 100000, 3);
    const auto pop = population_fisher(t, 0);
    const auto smp = sample_fisher_blocks(big, 0, t);
    CHECK(max_abs_diff(pop.q_ss, smp.q_ss) < 0.05 * 36);
    CHECK(jacobi_eigen(smp.q_ss).values.front() >= -1e-10);

    const InteractionTensor zero(6, 3);
    const auto s = exact_sample(t, 300, 4);
    const auto z = sample_fisher_blocks(s, 0, zero, true_support(t, 0));
    const NodeDesign design(6, 3, 0);
    const int j = design.index_of({1, 2});
    const int c0 = design.index_of(z.complement[0]);
    double cross = 0.0;
    for (int i = 0; i < s.n(); ++i) {
        const auto& a = design.feature(j);
        const auto& b = design.feature(c0);
        cross += s.at(i, a[0]) * s.at(i, a[1]) * s.at(i, b[0]) * s.at(i, b[1]);
    }
    CHECK(z.q_ss(0, 0) == doctest::Approx(36.0));
    CHECK(z.q_scs(0, 0) == doctest::Approx(36.0 * cross / s.n()).epsilon(1e-13));

    const auto one = sample_fisher_blocks(s.head(1), 0, t, {{1, 2}, {3, 4}});
    const auto ev = jacobi_eigen(one.q_ss).values;
    CHECK(std::abs(ev.front()) < 1e-10);
    CHECK_THROWS_AS(sample_fisher_blocks(exact_sample(InteractionTensor(5, 3), 4, 1), 0, t), DimensionError);
}

TEST_CASE("score norms") {
    const InteractionTensor t(5, 3, {{{0, 1, 2}, 0.2}, {{0, 3, 4}, -0.2}});
    CHECK(population_score_sup(t, 0) < 1e-14);
    const auto one = exact_sample(t, 1, 9);
    CHECK(score_sup(one, 0, t) <= 2 * 6.0);
    const double m = local_field(t, SpinConfiguration(std::vector<Spin>(one.row(0).begin(), one.row(0).end())), 0);
    CHECK(score_sup(one, 0, t) == doctest::Approx(6.0 * std::abs(one.at(0, 0) - std::tanh(3 * m))).epsilon(1e-13));
    // The score tail bound at the theory λ with α = 1 is 2 / C(p-1, k-1).
    CHECK(score_tail_bound(500, 8, 3, 1.0, lambda_theory(500, 8, 3, 1.0)) == doctest::Approx(2.0 / 21));
}

TEST_CASE("uniqueness certificate") {
    const InteractionTensor t(7, 3, {{{0, 2, 5}, 0.3}});
    const auto s = exact_sample(t, 5000, 2);
    NodeProblem prob(s, 0, 3);
    const double lmax = lambda_max(prob);
    const auto zero = uniqueness_certificate({}, s, 0, 3, lmax * 1.01);
    CHECK(zero.dual_strict);
    CHECK(zero.hessian_pd);
    CHECK_FALSE(uniqueness_certificate({}, s, 0, 3, lmax).dual_strict);
    const double lambda = lambda_practice(5000, 7, 3, 4.0);
    const auto fit = solve_l1(s, 0, 3, lambda);
    const auto cert = uniqueness_certificate(fit, s, 0, 3, lambda);
    CHECK(cert.certified());
    CHECK_THROWS_AS(uniqueness_certificate(fit, s, 0, 3, 0.0), ArgumentError);
}

TEST_CASE("concentration probe") {
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.3}});
    const std::vector<int> grid{100, 10000};
    const auto rows = concentration_probe(t, 0, grid, 7);
    REQUIRE(rows.size() == 3);
    const auto pop = population_fisher(t, 0);
    CHECK(rows[0].population);
    CHECK(rows[0].c_min == min_fisher_eigenvalue(pop));
    CHECK(rows[0].incoherence == incoherence(pop));
    CHECK(rows[0].d_max == population_d_max(t, 0));
    std::ostringstream os;
    write_concentration_csv(os, rows);
    CHECK(os.str().rfind("n,C_min_hat,D_max_hat,incoherence_hat,", 0) == 0);

    const auto zr = concentration_probe(InteractionTensor(6, 3, {{{1, 2, 3}, 0.2}}), 1, std::vector<int>{100000}, 1);
    CHECK(zr[1].incoherence < 0.1);
}

TEST_CASE("node report and l2 bound check") {
    const InteractionTensor zero(6, 3);
    for (int r = 0; r < 6; ++r) {
        const auto rep = node_diagnostics(zero, r);
        CHECK(rep.c_min == doctest::Approx(36.0));
        CHECK(rep.d_max == doctest::Approx(1.0));
        CHECK(rep.incoherence == 0.0);
    }
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.3}});
    const auto s = exact_sample(t, 20000, 3);
    const double lambda = lambda_practice(20000, 6, 3, 4.0);
    const auto rep = node_diagnostics(t, 1, &s, lambda);
    const auto fb = population_fisher(t, 1);
    CHECK(rep.c_min == min_fisher_eigenvalue(fb));
    CHECK(rep.incoherence == incoherence(fb));
    REQUIRE(rep.w_sup);
    CHECK(*rep.w_sup == score_sup(s, 1, t));
    REQUIRE(rep.dual_strict);
    const auto j = to_json(rep);
    CHECK(j["C_min"] == rep.c_min);

    const auto chk = l2_bound_check(s, 1, t, lambda);
    CHECK(chk.bound > 0.0);
    CHECK(chk.error >= 0.0);
}
