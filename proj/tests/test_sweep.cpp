#include "doctest.h"

#include <sstream>

#include "tising/errors.hpp"
#include "tising/svg_plot.hpp"
#include "tising/sweep.hpp"

using namespace tising;

namespace {

SweepConfig small_config() {
    SweepConfig c;
    c.p_list = {9, 12};
    c.k = 3;
    c.d = 2;
    c.alpha_grid = {0.5, 1.0};
    c.divisor = 3e5;
    c.trials = 3;
    c.base_seed = 42;
    c.burn_in_sweeps = 100;
    c.lambda.c_grid = {2.0, 4.0, 6.0};
    return c;
}

std::string csv_of(const SweepResult& r) {
    std::ostringstream os;
    write_sweep_csv(os, r.rows);
    return os.str();
}

} // namespace

TEST_CASE("sweep config validation") {
    auto c = small_config();
    CHECK_NOTHROW(c.validate());
    c.d = 0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = small_config();
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = small_config();
    c.n_grid = {10};
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = small_config();
    c.p_list = {10};
    CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("trial seeds") {
    CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
    CHECK(trial_seed(1, 2, 3) == splitmix64(1 ^ (2ULL * 1000000000ULL + 3)));
}

TEST_CASE("sweep is reproducible and schedule-independent") {
    auto c = small_config();
    c.workers = 1;
    const auto a = run_sweep(c);
    c.workers = 3;
    const auto b = run_sweep(c);
    CHECK(csv_of(a) == csv_of(b));
    REQUIRE(a.rows.size() == 12);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].grid_index == int(i) / 3);
        CHECK(a.rows[i].trial == int(i) % 3);
        CHECK(a.rows[i].status == "ok");
    }
    CHECK(render_sweep_svg(a.rows, PlotMetric::recovery_rate) == render_sweep_svg(b.rows, PlotMetric::recovery_rate));

    std::istringstream is(csv_of(a));
    const auto back = read_sweep_csv(is);
    CHECK(csv_of({back, {}}) == csv_of(a));
}

TEST_CASE("failed trials are recorded and excluded from aggregates") {
    auto c = small_config();
    c.p_list = {9};
    c.alpha_grid = {1.0};
    c.solve.max_iters = 1;
    c.solve.kkt_tol = 1e-15;
    const auto r = run_sweep(c);
    for (const auto& row : r.rows) CHECK(row.status == "solver_error");
    REQUIRE(r.summary.size() == 1);
    CHECK(r.summary[0].failed == 3);
    CHECK(r.summary[0].ok == 0);

    std::vector<SweepRow> rows(2);
    rows[0].status = "ok";
    rows[0].recovery_rate = 0.5;
    rows[0].success = false;
    rows[1].status = "solver_error";
    const auto s = summarize(rows);
    CHECK(s[0].ok == 1);
    CHECK(s[0].failed == 1);
    CHECK(s[0].mean_rate == 0.5);
}

TEST_CASE("svg structure") {
    const std::string empty = render_sweep_svg({}, PlotMetric::success_fraction);
    CHECK(empty.find("no data") != std::string::npos);
    CHECK(empty.find("<line") != std::string::npos);

    auto c = small_config();
    const auto r = run_sweep(c);
    const auto svg = render_sweep_svg(r.rows, PlotMetric::recovery_rate);
    std::size_t lines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) ++lines, ++pos;
    CHECK(lines == c.p_list.size());
    std::size_t circles = 0;
    pos = 0;
    while ((pos = svg.find("<circle", pos)) != std::string::npos) ++circles, ++pos;
    CHECK(circles == c.p_list.size() * c.alpha_grid.size());
}

TEST_CASE("JSON config mirrors the struct") {
    SweepConfig c;
    apply_json(c, nlohmann::json::parse(R"({"p":[16,32],"k":3,"d":2,"n_grid":[50,100],"trials":4,
        "lambda_mode":"fixed","c":[3.5],"rule":"or","seed":9,"sampler":"exact"})"));
    CHECK(c.p_list == std::vector<int>{16, 32});
    CHECK(c.n_grid == std::vector<int>{50, 100});
    CHECK(c.lambda.mode == LambdaMode::fixed);
    CHECK(c.lambda.lambda == 3.5);
    CHECK(c.rule.mode == AggregationMode::or_max);
    CHECK(c.sampler == SamplerKind::exact);
    CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"k":"three"})")), ArgumentError);
    CHECK(format_number(0.1) == "0.1");
}
