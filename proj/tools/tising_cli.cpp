// Command-line front end: generate, sample, fit, diagnose, sweep, plot, ingest.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "tising/diagnostics.hpp"
#include "tising/errors.hpp"
#include "tising/generators.hpp"
#include "tising/recovery.hpp"
#include "tising/sampler.hpp"
#include "tising/svg_plot.hpp"
#include "tising/sweep.hpp"

namespace fs = std::filesystem;
using namespace tising;

namespace {

enum Exit { kOk = 0, kValidation = 2, kCapacity = 3, kSolver = 4 };

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArgumentError("cannot write " + path.string());
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArgumentError("cannot read " + path);
    return is;
}

SignMode parse_sign_mode(const std::string& s) {
    if (s == "all_plus") return SignMode::all_plus;
    if (s == "rademacher") return SignMode::rademacher;
    throw ArgumentError("unknown sign mode '" + s + "' (all_plus|rademacher)");
}

LambdaSpec lambda_spec(const std::string& mode, const std::vector<double>& c, double alpha, double lambda) {
    LambdaSpec spec;
    spec.mode = parse_lambda_mode(mode);
    spec.alpha = alpha;
    if (!c.empty()) spec.c_grid = c;
    spec.lambda = lambda;
    return spec;
}

void print_json(const nlohmann::json& j, const fs::path& path) {
    auto os = open_out(path);
    os << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure learning for k-tensor Ising models"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Random d-regular k-uniform hypergraph with couplings");
    int g_p = 32, g_k = 3, g_d = 3;
    std::uint64_t g_seed = 0;
    double g_coupling = 0.0;
    std::string g_signs = "all_plus", g_out = "tensor.txt";
    gen->add_option("--p", g_p, "number of spins");
    gen->add_option("--k", g_k, "interaction order");
    gen->add_option("--d", g_d, "vertex degree");
    gen->add_option("--seed", g_seed);
    gen->add_option("--coupling", g_coupling, "edge magnitude (default 0.5/k!)");
    gen->add_option("--signs", g_signs, "all_plus|rademacher");
    gen->add_option("--out", g_out);

    // sample
    auto* smp = app.add_subcommand("sample", "Draw samples from a tensor");
    std::string s_tensor, s_out = "samples.csv", s_scan = "systematic";
    int s_n = 1000, s_burn = 1000, s_spacing = 5;
    std::uint64_t s_seed = 0;
    bool s_exact = false, s_restart = false;
    smp->add_option("--tensor", s_tensor)->required();
    smp->add_option("--n", s_n);
    smp->add_option("--seed", s_seed);
    smp->add_option("--burn-in", s_burn);
    smp->add_option("--spacing", s_spacing);
    smp->add_option("--scan", s_scan, "systematic|random");
    smp->add_flag("--exact", s_exact, "inverse-CDF sampling from the enumerated distribution");
    smp->add_flag("--restart", s_restart, "independent chain per sample");
    smp->add_option("--out", s_out);

    // fit
    auto* fit = app.add_subcommand("fit", "Node-wise l1 pseudolikelihood fit and aggregation");
    std::string f_samples, f_truth, f_mode = "practice", f_rule = "and", f_out = "fit";
    int f_k = 3;
    std::vector<double> f_c;
    double f_alpha = 1.0, f_lambda = 0.0;
    fit->add_option("--samples", f_samples)->required();
    fit->add_option("--k", f_k, "interaction order");
    fit->add_option("--truth", f_truth, "tensor file to score against");
    fit->add_option("--lambda-mode", f_mode, "theory|practice|fixed");
    fit->add_option("--c", f_c, "BIC grid for practice mode");
    fit->add_option("--alpha-incoh", f_alpha, "incoherence α for theory mode");
    fit->add_option("--lambda", f_lambda, "λ for fixed mode");
    fit->add_option("--rule", f_rule, "and|or");
    fit->add_option("--out-dir", f_out);

    // diagnose
    auto* dia = app.add_subcommand("diagnose", "Fisher-matrix diagnostics per node");
    std::string d_tensor, d_samples, d_out = "diagnostics";
    double d_lambda = 0.0;
    std::vector<int> d_ngrid{100, 1000, 10000};
    std::uint64_t d_seed = 0;
    int d_cap = kDefaultEnumerationCap;
    bool d_no_probe = false;
    dia->add_option("--tensor", d_tensor)->required();
    dia->add_option("--samples", d_samples, "also report score norm and uniqueness certificate");
    dia->add_option("--lambda", d_lambda, "λ for the uniqueness certificate");
    dia->add_option("--n-grid", d_ngrid, "sample sizes for the concentration probe");
    dia->add_option("--seed", d_seed);
    dia->add_option("--cap", d_cap, "enumeration cap on p");
    dia->add_flag("--no-probe", d_no_probe);
    dia->add_option("--out-dir", d_out);

    // sweep
    auto* swp = app.add_subcommand("sweep", "Recovery experiment over a grid of sample sizes");
    SweepConfig cfg;
    std::string w_config, w_out = "sweep", w_mode = "practice", w_rule = "and", w_signs = "all_plus",
                w_sampler = "gibbs";
    std::vector<int> w_p;
    std::vector<double> w_alpha, w_c;
    std::vector<int> w_n;
    swp->add_option("--config", w_config, "JSON config; flags override it");
    auto* o_p = swp->add_option("--p", w_p);
    swp->add_option("--k", cfg.k);
    swp->add_option("--d", cfg.d);
    auto* o_alpha = swp->add_option("--alpha-grid", w_alpha);
    auto* o_n = swp->add_option("--n-grid", w_n);
    swp->add_option("--trials", cfg.trials);
    auto* o_mode = swp->add_option("--lambda-mode", w_mode, "theory|practice|fixed");
    auto* o_c = swp->add_option("--c", w_c, "BIC grid (practice) or the constant c (fixed)");
    swp->add_option("--alpha-incoh", cfg.lambda.alpha);
    swp->add_option("--divisor", cfg.divisor);
    swp->add_option("--seed", cfg.base_seed);
    swp->add_option("--workers", cfg.workers);
    auto* o_rule = swp->add_option("--rule", w_rule, "and|or");
    swp->add_option("--coupling", cfg.coupling);
    auto* o_signs = swp->add_option("--signs", w_signs, "all_plus|rademacher");
    auto* o_sampler = swp->add_option("--sampler", w_sampler, "gibbs|exact");
    swp->add_option("--out-dir", w_out);

    // plot
    auto* plt = app.add_subcommand("plot", "Render a sweep CSV as SVG");
    std::string p_csv, p_out = "sweep.svg", p_metric = "rate";
    plt->add_option("--csv", p_csv)->required();
    plt->add_option("--metric", p_metric, "rate|success");
    plt->add_option("--out", p_out);

    // ingest
    auto* ing = app.add_subcommand("ingest", "Convert external data");
    std::string i_graph, i_series, i_out;
    int i_thin = 3;
    double i_coupling = 0.0;
    ing->add_option("--graph", i_graph, "edge list `u v`; writes the triangle tensor");
    ing->add_option("--series", i_series, "CSV time series; writes binarized samples");
    ing->add_option("--thin", i_thin, "keep every thin-th retained time point");
    ing->add_option("--coupling", i_coupling, "coefficient for extracted triangles (default 0.5/k!)");
    ing->add_option("--out", i_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*gen) {
            const auto h = regular_hypergraph(g_p, g_k, g_d, splitmix64(g_seed ^ 1));
            const auto t = assign_coefficients(h, {g_coupling, parse_sign_mode(g_signs), splitmix64(g_seed ^ 2)});
            save_tensor(g_out, t);
            std::cout << "wrote " << t.edge_count() << " edges to " << g_out << '\n';
        } else if (*smp) {
            const auto t = load_tensor(s_tensor);
            SampleMatrix m;
            if (s_exact) {
                m = exact_sample(t, s_n, s_seed);
            } else {
                GibbsConfig g;
                g.burn_in_sweeps = s_burn;
                g.spacing_sweeps = s_spacing;
                g.seed = s_seed;
                g.restart = s_restart;
                if (s_scan == "systematic") g.scan = ScanOrder::systematic;
                else if (s_scan == "random") g.scan = ScanOrder::random;
                else throw ArgumentError("unknown scan order '" + s_scan + "'");
                m = draw_samples(t, s_n, g);
            }
            save_samples(s_out, m);
            std::cout << "wrote " << m.n() << " samples to " << s_out << '\n';
        } else if (*fit) {
            const auto samples = load_samples(f_samples);
            std::optional<InteractionTensor> truth;
            if (!f_truth.empty()) truth = load_tensor(f_truth);
            const auto spec = lambda_spec(f_mode, f_c, f_alpha, f_lambda);
            const auto rep = run_pipeline(samples, f_k, truth, spec, {parse_aggregation(f_rule)});
            const fs::path dir(f_out);
            print_json(to_json(rep), dir / "report.json");
            auto cos = open_out(dir / "coefficients.txt");
            for (const auto& nb : rep.neighborhoods) {
                SparseCoefVector c;
                for (const auto& e : nb.entries) c.entries[e.others] = e.sign * e.magnitude;
                write_coefficients(cos, nb.r, c);
            }
            std::cout << "estimated " << rep.estimated.edges.size() << " edges at λ = " << rep.lambda_used << " in "
                      << rep.wall_seconds << " s; wrote " << (dir / "report.json").string() << '\n';
        } else if (*dia) {
            const auto t = load_tensor(d_tensor);
            if (t.p() > d_cap)
                throw CapacityError("diagnose: p = " + std::to_string(t.p()) + " exceeds the enumeration cap " +
                                    std::to_string(d_cap) +
                                    "; population quantities need all 2^p states (raise --cap at your own cost)");
            std::optional<SampleMatrix> samples;
            if (!d_samples.empty()) samples = load_samples(d_samples);
            std::optional<double> lam;
            if (d_lambda > 0.0) lam = d_lambda;
            std::vector<DiagnosticsReport> reports;
            nlohmann::json nodes = nlohmann::json::array();
            for (int r = 0; r < t.p(); ++r) {
                reports.push_back(node_diagnostics(t, r, samples ? &*samples : nullptr, lam, {}, d_cap));
                nodes.push_back(to_json(reports.back()));
            }
            const fs::path dir(d_out);
            print_json({{"nodes", nodes}, {"summary", summarize(reports)}}, dir / "diagnostics.json");
            if (!d_no_probe) {
                for (int r = 0; r < t.p(); ++r) {
                    if (t.incident(r).empty()) continue;
                    auto os = open_out(dir / ("concentration_node" + std::to_string(r) + ".csv"));
                    write_concentration_csv(os, concentration_probe(t, r, d_ngrid, d_seed, d_cap));
                }
            }
            std::cout << "wrote diagnostics for " << t.p() << " nodes to " << dir.string() << '\n';
        } else if (*swp) {
            if (!w_config.empty()) {
                auto is = open_in(w_config);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(is);
                } catch (const nlohmann::json::exception& e) {
                    throw ArgumentError(std::string("config: ") + e.what());
                }
                apply_json(cfg, j);
            }
            // Flags override the file.
            if (*o_p) cfg.p_list = w_p;
            if (*o_alpha) {
                cfg.alpha_grid = w_alpha;
                if (!*o_n) cfg.n_grid.clear();
            }
            if (*o_n) {
                cfg.n_grid = w_n;
                if (!*o_alpha) cfg.alpha_grid.clear();
            }
            if (cfg.alpha_grid.empty() && cfg.n_grid.empty()) cfg.alpha_grid = {0.4, 0.8, 1.2, 1.6, 2.0};
            if (*o_mode || w_config.empty()) cfg.lambda.mode = parse_lambda_mode(w_mode);
            if (*o_c) {
                cfg.lambda.c_grid = w_c;
                cfg.lambda.lambda = w_c.front();
            }
            if (*o_rule || w_config.empty()) cfg.rule.mode = parse_aggregation(w_rule);
            if (*o_signs || w_config.empty()) cfg.sign_mode = parse_sign_mode(w_signs);
            if (*o_sampler || w_config.empty()) {
                if (w_sampler == "gibbs") cfg.sampler = SamplerKind::gibbs;
                else if (w_sampler == "exact") cfg.sampler = SamplerKind::exact;
                else throw ArgumentError("unknown sampler '" + w_sampler + "'");
            }

            const auto res = run_sweep(cfg);
            const fs::path dir(w_out);
            {
                auto os = open_out(dir / "sweep.csv");
                write_sweep_csv(os, res.rows);
            }
            {
                auto os = open_out(dir / "summary.csv");
                write_summary_csv(os, res.summary);
            }
            {
                auto os = open_out(dir / "timing.csv");
                write_timing_csv(os, res.rows);
            }
            open_out(dir / "recovery_rate.svg") << render_sweep_svg(res.rows, PlotMetric::recovery_rate);
            open_out(dir / "success.svg") << render_sweep_svg(res.rows, PlotMetric::success_fraction);
            int failed = 0;
            for (const auto& s : res.summary) failed += s.failed;
            write_summary_csv(std::cout, res.summary);
            if (failed) std::cerr << failed << " trial(s) failed; see the status column of sweep.csv\n";
        } else if (*plt) {
            auto is = open_in(p_csv);
            const auto rows = read_sweep_csv(is);
            PlotMetric metric;
            if (p_metric == "rate") metric = PlotMetric::recovery_rate;
            else if (p_metric == "success") metric = PlotMetric::success_fraction;
            else throw ArgumentError("unknown metric '" + p_metric + "' (rate|success)");
            open_out(p_out) << render_sweep_svg(rows, metric);
        } else if (*ing) {
            if (i_graph.empty() == i_series.empty()) throw ArgumentError("ingest: give exactly one of --graph, --series");
            if (!i_graph.empty()) {
                auto is = open_in(i_graph);
                const auto h = triangles_from_graph(read_edge_list(is));
                if (h.p < 4) throw ArgumentError("ingest: graph needs at least 4 vertices");
                save_tensor(i_out, assign_coefficients(h, {i_coupling, SignMode::all_plus, 0}));
                std::cout << "wrote " << h.edges.size() << " triangles on " << h.p << " vertices to " << i_out << '\n';
            } else {
                auto is = open_in(i_series);
                const auto m = binarize_series(read_series_csv(is), i_thin);
                save_samples(i_out, m);
                std::cout << "wrote " << m.n() << " binarized rows to " << i_out << '\n';
            }
        }
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kCapacity;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const DiagnosticError& e) {
        std::cerr << "diagnostic error: " << e.what() << '\n';
        return kSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}
