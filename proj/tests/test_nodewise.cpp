#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tising/errors.hpp"
#include "tising/nodewise.hpp"
#include "tising/sampler.hpp"

using namespace tising;

namespace {

SparseCoefVector random_coef(int p, int k, int r, Rng& rng, double scale = 0.3) {
    SparseCoefVector c;
    for (const auto& s : oracle::subsets(p, k - 1, r))
        if (rng.uniform() < 0.5) c.entries[s] = (2 * rng.uniform() - 1) * scale;
    return c;
}

double l1(const SolveResult& r) {
    double s = 0.0;
    for (double v : r.dense) s += std::abs(v);
    return s;
}

} // namespace

TEST_CASE("pseudo_loss") {
    Rng rng(5);
    const auto t = oracle::random_tensor(5, 3, 0.6, rng);
    const auto s = exact_sample(t, 300, 1);
    CHECK(pseudo_loss({}, s, 2, 3) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    for (int r = 0; r < 5; ++r) {
        double expected = 0.0;
        for (int i = 0; i < s.n(); ++i) {
            const SpinConfiguration x(std::vector<Spin>(s.row(i).begin(), s.row(i).end()));
            expected -= std::log(conditional_prob(t, x, r, x[r]));
        }
        expected /= s.n();
        CHECK(std::abs(pseudo_loss(node_coefficients(t, r), s, r, 3) - expected) < 1e-12);
        const auto c = random_coef(5, 3, r, rng);
        CHECK(pseudo_loss(c, s, r, 3) ==
              doctest::Approx(oracle::pseudo_loss(c.entries, oracle::rows_of(s), r, 3)).epsilon(1e-12));
    }

    // Perfectly separable labels: scaling up the right coefficient drives the loss to 0.
    SampleMatrix sep(4, 4, {1, 1, 1, 1, -1, 1, -1, 1, -1, -1, 1, 1, 1, -1, -1, -1});
    double prev = 1e9;
    for (double mag : {0.1, 1.0, 5.0, 20.0}) {
        SparseCoefVector c;
        c.entries[{1, 2}] = mag;
        const double l = pseudo_loss(c, sep, 0, 3);
        CHECK(l < prev);
        prev = l;
    }
    CHECK(prev < 1e-20);
}

TEST_CASE("pseudo_grad") {
    Rng rng(6);
    const auto t = oracle::random_tensor(6, 3, 0.5, rng);
    const auto s = exact_sample(t, 400, 2);
    const int r = 1, k = 3;
    NodeProblem prob(s, r, k);
    const auto g0 = pseudo_grad({}, s, r, k);
    for (int j = 0; j < prob.dim(); ++j) {
        double mu = 0.0;
        for (int i = 0; i < s.n(); ++i) mu += s.at(i, r) * prob.features().at(i, j);
        CHECK(g0[j] == doctest::Approx(-6.0 * mu / s.n()).epsilon(1e-13));
    }

    const auto c = random_coef(6, k, r, rng);
    const auto g = pseudo_grad(c, s, r, k);
    auto dense = prob.to_dense(c);
    const double h = 1e-5;
    for (int j = 0; j < prob.dim(); ++j) {
        auto up = dense, dn = dense;
        up[j] += h;
        dn[j] -= h;
        const double fd = (prob.loss(up) - prob.loss(dn)) / (2 * h);
        CHECK(std::abs(g[j] - fd) <= 1e-6 * std::max(std::abs(fd), 1e-3));
    }

    // E_J[W] = 0 at the truth, by weighting each of the 32 states.
    const InteractionTensor t5(5, 3, {{{0, 1, 2}, 0.2}, {{0, 3, 4}, -0.15}});
    const auto dist = exact_distribution(t5);
    std::vector<double> expect(6, 0.0);
    for (std::uint64_t st = 0; st < 32; ++st) {
        const auto x = SpinConfiguration::from_index(st, 5);
        SampleMatrix one(1, 5, std::vector<Spin>(x.view().begin(), x.view().end()));
        const auto gi = pseudo_grad(node_coefficients(t5, 0), one, 0, 3);
        for (int j = 0; j < 6; ++j) expect[j] += dist.probs[st] * gi[j];
    }
    for (double v : expect) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("kkt residual") {
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.2}});
    const auto s = exact_sample(t, 500, 3);
    NodeProblem prob(s, 0, 3);
    const double lmax = lambda_max(prob);
    CHECK(kkt_residual({}, s, 0, 3, lmax * 1.01) == 0.0);
    Rng rng(1);
    CHECK(kkt_residual(random_coef(6, 3, 0, rng), s, 0, 3, 0.1) > 0.0);
    const auto fit = solve_l1(s, 0, 3, 0.3 * lmax);
    CHECK(kkt_residual(fit, s, 0, 3, 0.3 * lmax) <= 1e-6);
}

TEST_CASE("solve_l1: full shrinkage above lambda_max") {
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.2}});
    const auto s = exact_sample(t, 500, 3);
    NodeProblem prob(s, 2, 3);
    const double lmax = lambda_max(prob);
    CHECK(solve_l1(s, 2, 3, lmax * 1.0001).nonzeros() == 0);
    CHECK_THROWS_AS(solve_l1(s, 2, 3, -1.0), ArgumentError);
}

TEST_CASE("solve_l1: matches a slow reference at λ = 0") {
    const InteractionTensor t(5, 2, {{{0, 1}, 0.3}, {{0, 3}, -0.2}, {{2, 4}, 0.25}});
    const auto s = exact_sample(t, 200, 4);
    NodeProblem prob(s, 0, 2);
    SolveOptions opts;
    opts.kkt_tol = 1e-10;
    const auto fit = solve_l1_detailed(prob, 0.0, opts);
    CHECK(fit.converged);
    const auto ref = oracle::slow_ista(oracle::rows_of(s), 0, 2, 0.0, 1000000, 1e-12);
    CHECK(std::abs(fit.objective - ref.objective) < 1e-8);
}

TEST_CASE("solve_l1: matches the slow reference with a penalty, warm start agrees") {
    Rng rng(8);
    const auto t = oracle::random_tensor(7, 3, 0.3, rng);
    const auto s = exact_sample(t, 300, 5);
    NodeProblem prob(s, 3, 3);
    const double lambda = 0.25 * lambda_max(prob);
    const auto fit = solve_l1_detailed(prob, lambda);
    CHECK(fit.converged);
    CHECK(fit.kkt < 1e-6);
    const auto ref = oracle::slow_ista(oracle::rows_of(s), 3, 3, lambda, 1000000, 1e-11);
    CHECK(fit.objective == doctest::Approx(ref.objective).epsilon(1e-9));
    CHECK(std::abs(fit.objective - (prob.loss(fit.dense) + lambda * l1(fit))) < 1e-12);

    const auto warm = solve_l1_detailed(prob, lambda, {}, ref.coef);
    CHECK(warm.converged);
    CHECK(warm.iterations <= fit.iterations);
}

TEST_CASE("solve_l1: planted edge is found with the right sign") {
    const InteractionTensor t(8, 3, {{{0, 3, 5}, 0.25}});
    const auto s = exact_sample(t, 3000, 6);
    const double lambda = lambda_practice(3000, 8, 3, 4.0);
    const auto fit = solve_l1(s, 3, 3, lambda);
    REQUIRE(fit.nonzeros() == 1);
    CHECK(fit.entries.begin()->first == Subset{0, 5});
    CHECK(fit.entries.begin()->second > 0.0);
}

TEST_CASE("non-convergence raises a solver error with its residual") {
    const InteractionTensor t(6, 3, {{{0, 1, 2}, 0.2}});
    const auto s = exact_sample(t, 500, 3);
    SolveOptions opts;
    opts.max_iters = 2;
    opts.kkt_tol = 1e-14;
    try {
        solve_l1(s, 0, 3, 0.01, opts);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("lambda schedules") {
    CHECK(lambda_theory(1000, 10, 2, 1.0) == doctest::Approx(32.0 * std::sqrt(std::log(9.0) / 1000)).epsilon(1e-14));
    CHECK(lambda_theory(1000, 10, 2, 1.0) == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(lambda_theory(1000, 10, 2, 2.0 / 3.0) / lambda_theory(1000, 10, 2, 1.0) == doctest::Approx(2.0));
    CHECK(lambda_theory(4000, 10, 2, 1.0) == doctest::Approx(lambda_theory(1000, 10, 2, 1.0) / 2));
    CHECK_THROWS_AS(lambda_theory(1000, 10, 2, 0.0), ArgumentError);
    CHECK_THROWS_AS(lambda_theory(1000, 10, 2, 1.5), ArgumentError);
    CHECK(lambda_practice(100, 32, 3, 0.5) == doctest::Approx(0.5 * std::sqrt(3 * std::log(32.0) / 100)));
    CHECK(lambda_practice(100, 32, 3, 0.5) == doctest::Approx(0.1612).epsilon(1e-3));
    CHECK(lambda_practice(100, 32, 3, 1.0) == doctest::Approx(2 * lambda_practice(100, 32, 3, 0.5)));
    CHECK_THROWS_AS(lambda_practice(100, 32, 3, 0.0), ArgumentError);
}

TEST_CASE("BIC selection") {
    const InteractionTensor t(16, 3, {{{2, 7, 11}, 0.3}});
    const auto s = exact_sample(t, 4000, 7);
    NodeProblem prob(s, 7, 3);

    const std::vector<double> huge{1e3, 2e3, 3e3};
    const auto null = bic_select(prob, huge);
    CHECK(null.c == 1e3);
    for (const auto& sc : null.scores) {
        CHECK(sc.df == 0);
        CHECK(sc.bic == doctest::Approx(2.0 * s.n() * std::log(2.0)));
    }
    const std::vector<double> one{1.3};
    CHECK(bic_select(prob, one).c == 1.3);
    CHECK_THROWS_AS(bic_select(prob, std::vector<double>{}), ArgumentError);

    const auto grid = default_c_grid();
    const auto sel = bic_select(prob, grid);
    const auto fit = solve_l1(s, 7, 3, sel.lambda);
    REQUIRE(fit.nonzeros() == 1);
    CHECK(fit.entries.begin()->first == Subset{2, 11});
}

TEST_CASE("coefficient dump") {
    SparseCoefVector c;
    c.entries[{1, 4}] = 0.25;
    std::ostringstream os;
    write_coefficients(os, 0, c);
    CHECK(os.str() == "0 | 1 4 | 0.25\n");
}
