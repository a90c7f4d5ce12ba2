#include "tising/sweep.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tising/errors.hpp"
#include "tising/rng.hpp"

namespace tising {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void SweepConfig::validate() const {
    if (p_list.empty()) throw ArgumentError("sweep: p list is empty");
    if (alpha_grid.empty() == n_grid.empty()) throw ArgumentError("sweep: give exactly one of an α grid or an n grid");
    if (trials < 1) throw ArgumentError("sweep: trials must be at least 1");
    if (d < 1) throw ArgumentError("sweep: d must be at least 1 so every trial has a nonempty truth");
    if (k < 2) throw ArgumentError("sweep: k must be at least 2");
    if (!(divisor > 0.0)) throw ArgumentError("sweep: divisor must be positive");
    if (coupling < 0.0) throw ArgumentError("sweep: coupling must be positive");
    if (workers < 0) throw ArgumentError("sweep: workers must be nonnegative");
    for (int p : p_list)
        if (p <= k || (std::int64_t(p) * d) % k != 0)
            throw ArgumentError("sweep: p = " + std::to_string(p) + " needs p > k and p*d divisible by k");
    for (double a : alpha_grid)
        if (!(a > 0.0)) throw ArgumentError("sweep: α values must be positive");
    for (int n : n_grid)
        if (n < 1) throw ArgumentError("sweep: n values must be positive");
    if (lambda.mode == LambdaMode::theory && !(lambda.alpha > 0.0 && lambda.alpha <= 1.0))
        throw ArgumentError("sweep: incoherence α must lie in (0, 1]");
    if (lambda.mode == LambdaMode::practice && lambda.c_grid.empty())
        throw ArgumentError("sweep: practice mode needs a nonempty c grid");
    if (lambda.mode == LambdaMode::fixed && !(lambda.lambda > 0.0))
        throw ArgumentError("sweep: fixed mode needs a positive constant c");
    if (burn_in_sweeps < 0 || spacing_sweeps < 1) throw ArgumentError("sweep: bad Gibbs schedule");
}

int SweepConfig::grid_size() const {
    return static_cast<int>(p_list.size() * (alpha_grid.empty() ? n_grid.size() : alpha_grid.size()));
}

std::vector<GridPoint> grid_points(const SweepConfig& cfg) {
    std::vector<GridPoint> out;
    for (int p : cfg.p_list) {
        if (!cfg.alpha_grid.empty()) {
            for (double a : cfg.alpha_grid) out.push_back({p, a, scaling_n(a, p, cfg.k, cfg.d, cfg.divisor)});
        } else {
            const double exact_unit =
                std::pow(factorial(cfg.k), 8) * std::pow(double(cfg.d), 3) * log_binomial(p - 1, cfg.k - 1);
            for (int n : cfg.n_grid) out.push_back({p, n * cfg.divisor / exact_unit, n});
        }
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t base, int grid_index, int trial) {
    return splitmix64(base ^ (std::uint64_t(grid_index) * 1'000'000'000ULL + std::uint64_t(trial)));
}

SweepRow run_trial(const SweepConfig& cfg, int grid_index, const GridPoint& point, int trial) {
    SweepRow row;
    row.grid_index = grid_index;
    row.point = point;
    row.k = cfg.k;
    row.d = cfg.d;
    row.trial = trial;
    row.seed = trial_seed(cfg.base_seed, grid_index, trial);

    const auto start = std::chrono::steady_clock::now();
    if (point.n > std::numeric_limits<int>::max()) throw CapacityError("sweep: n exceeds the supported range");
    const int n = static_cast<int>(point.n);
    const auto support = regular_hypergraph(point.p, cfg.k, cfg.d, splitmix64(row.seed ^ 1));
    const auto truth = assign_coefficients(support, {cfg.coupling, cfg.sign_mode, splitmix64(row.seed ^ 2)});
    const std::uint64_t sample_seed = splitmix64(row.seed ^ 3);
    SampleMatrix samples;
    if (cfg.sampler == SamplerKind::exact) {
        samples = exact_sample(truth, n, sample_seed);
    } else {
        GibbsConfig g;
        g.burn_in_sweeps = cfg.burn_in_sweeps;
        g.spacing_sweeps = cfg.spacing_sweeps;
        g.seed = sample_seed;
        samples = draw_samples(truth, n, g);
    }
    LambdaSpec spec = cfg.lambda;
    if (spec.mode == LambdaMode::fixed) {
        // In sweeps the fixed mode holds the constant c of c sqrt(k log p / n).
        spec.lambda = lambda_practice(n, point.p, cfg.k, cfg.lambda.lambda);
    }
    const auto rep = run_pipeline(samples, cfg.k, truth, spec, cfg.rule, cfg.solve);
    row.recovery_rate = rep.recovery_rate;
    row.success = rep.success;
    row.success_unsigned = rep.success_unsigned;
    row.false_positives = rep.false_positives;
    row.lambda_used = rep.lambda_used;
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

namespace {

std::string error_class(const std::exception& e) {
    if (dynamic_cast<const CapacityError*>(&e)) return "capacity_error";
    if (dynamic_cast<const SolverError*>(&e)) return "solver_error";
    if (dynamic_cast<const GenerationError*>(&e)) return "generation_error";
    if (dynamic_cast<const ArgumentError*>(&e)) return "argument_error";
    return "error";
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

} // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto points = grid_points(cfg);
    const int total = static_cast<int>(points.size()) * cfg.trials;
    SweepResult result;
    result.rows.resize(total);
    const int workers = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (int idx = 0; idx < total; ++idx) {
        const int g = idx / cfg.trials;
        const int t = idx % cfg.trials;
        try {
            result.rows[idx] = run_trial(cfg, g, points[g], t);
        } catch (const std::exception& e) {
            SweepRow row;
            row.grid_index = g;
            row.point = points[g];
            row.k = cfg.k;
            row.d = cfg.d;
            row.trial = t;
            row.seed = trial_seed(cfg.base_seed, g, t);
            row.status = error_class(e);
            row.message = sanitize(e.what());
            result.rows[idx] = std::move(row);
        }
    }
    result.summary = summarize(result.rows);
    return result;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
    std::map<int, SweepSummary> by_grid;
    std::map<int, double> rate_sum, succ_sum;
    for (const auto& r : rows) {
        auto& s = by_grid[r.grid_index];
        s.point = r.point;
        if (r.status != "ok") {
            ++s.failed;
            continue;
        }
        ++s.ok;
        rate_sum[r.grid_index] += r.recovery_rate.value_or(0.0);
        succ_sum[r.grid_index] += r.success.value_or(false) ? 1.0 : 0.0;
    }
    std::vector<SweepSummary> out;
    for (auto& [g, s] : by_grid) {
        if (s.ok > 0) {
            s.mean_rate = rate_sum[g] / s.ok;
            s.success_fraction = succ_sum[g] / s.ok;
        } else {
            s.mean_rate = s.success_fraction = std::nan("");
        }
        out.push_back(s);
    }
    return out;
}

namespace {

const char* kSweepHeader =
    "grid_index,p,k,d,alpha,n,trial,seed,status,recovery_rate,success,success_unsigned,false_positives,lambda_used,"
    "message";

template <class T>
std::string opt(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_same_v<T, bool>) return *v ? "1" : "0";
    else if constexpr (std::is_same_v<T, double>) return format_number(*v);
    else return std::to_string(*v);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepCsvVersion << '\n' << kSweepHeader << '\n';
    for (const auto& r : rows)
        os << r.grid_index << ',' << r.point.p << ',' << r.k << ',' << r.d << ',' << format_number(r.point.alpha)
           << ',' << r.point.n << ',' << r.trial << ',' << r.seed << ',' << r.status << ','
           << opt(r.recovery_rate) << ',' << opt(r.success) << ',' << opt(r.success_unsigned) << ','
           << opt(r.false_positives) << ',' << opt(r.lambda_used) << ',' << r.message << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
    std::string line;
    int lineno = 0;
    bool header = false;
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kSweepHeader) throw ParseError("not a sweep CSV: unexpected header", lineno);
            header = true;
            continue;
        }
        const auto c = split_csv(line);
        if (c.size() != 15) throw ParseError("expected 15 columns, found " + std::to_string(c.size()), lineno);
        try {
            SweepRow r;
            r.grid_index = std::stoi(c[0]);
            r.point.p = std::stoi(c[1]);
            r.k = std::stoi(c[2]);
            r.d = std::stoi(c[3]);
            r.point.alpha = std::stod(c[4]);
            r.point.n = std::stoll(c[5]);
            r.trial = std::stoi(c[6]);
            r.seed = std::stoull(c[7]);
            r.status = c[8];
            if (!c[9].empty()) r.recovery_rate = std::stod(c[9]);
            if (!c[10].empty()) r.success = c[10] == "1";
            if (!c[11].empty()) r.success_unsigned = c[11] == "1";
            if (!c[12].empty()) r.false_positives = std::stoi(c[12]);
            if (!c[13].empty()) r.lambda_used = std::stod(c[13]);
            r.message = c[14];
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("malformed numeric field", lineno);
        }
    }
    if (!header) throw ParseError("not a sweep CSV: header missing", lineno);
    return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SweepSummary>& summary) {
    os << kSweepCsvVersion << '\n' << "p,alpha,n,ok,failed,mean_recovery_rate,success_fraction\n";
    for (const auto& s : summary)
        os << s.point.p << ',' << format_number(s.point.alpha) << ',' << s.point.n << ',' << s.ok << ',' << s.failed
           << ',' << format_number(s.mean_rate) << ',' << format_number(s.success_fraction) << '\n';
}

void write_timing_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "grid_index,trial,wall_seconds\n";
    for (const auto& r : rows) os << r.grid_index << ',' << r.trial << ',' << r.wall_seconds << '\n';
}

void apply_json(SweepConfig& cfg, const nlohmann::json& j) {
    try {
        if (j.contains("p")) {
            cfg.p_list = j["p"].is_array() ? j["p"].get<std::vector<int>>() : std::vector<int>{j["p"].get<int>()};
        }
        if (j.contains("k")) cfg.k = j["k"].get<int>();
        if (j.contains("d")) cfg.d = j["d"].get<int>();
        if (j.contains("alpha_grid")) cfg.alpha_grid = j["alpha_grid"].get<std::vector<double>>();
        if (j.contains("n_grid")) cfg.n_grid = j["n_grid"].get<std::vector<int>>();
        if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
        if (j.contains("divisor")) cfg.divisor = j["divisor"].get<double>();
        if (j.contains("lambda_mode")) cfg.lambda.mode = parse_lambda_mode(j["lambda_mode"].get<std::string>());
        if (j.contains("c")) {
            const auto c = j["c"].is_array() ? j["c"].get<std::vector<double>>()
                                             : std::vector<double>{j["c"].get<double>()};
            cfg.lambda.c_grid = c;
            if (!c.empty()) cfg.lambda.lambda = c.front();
        }
        if (j.contains("alpha_incoh")) cfg.lambda.alpha = j["alpha_incoh"].get<double>();
        if (j.contains("rule")) cfg.rule.mode = parse_aggregation(j["rule"].get<std::string>());
        if (j.contains("seed")) cfg.base_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("coupling")) cfg.coupling = j["coupling"].get<double>();
        if (j.contains("sign_mode")) {
            const auto s = j["sign_mode"].get<std::string>();
            if (s == "all_plus") cfg.sign_mode = SignMode::all_plus;
            else if (s == "rademacher") cfg.sign_mode = SignMode::rademacher;
            else throw ArgumentError("config: unknown sign_mode '" + s + "'");
        }
        if (j.contains("sampler")) {
            const auto s = j["sampler"].get<std::string>();
            if (s == "gibbs") cfg.sampler = SamplerKind::gibbs;
            else if (s == "exact") cfg.sampler = SamplerKind::exact;
            else throw ArgumentError("config: unknown sampler '" + s + "'");
        }
        if (j.contains("burn_in")) cfg.burn_in_sweeps = j["burn_in"].get<int>();
        if (j.contains("spacing")) cfg.spacing_sweeps = j["spacing"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
}

} // namespace tising
