#include "tising/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tising/errors.hpp"

namespace tising {

SampleMatrix::SampleMatrix(int n, int p)
    : n_(n), p_(p), data_(std::size_t(std::max(n, 0)) * std::max(p, 0), Spin{1}) {
    if (n < 0 || p < 0) throw ArgumentError("sample matrix: negative dimension");
}

SampleMatrix::SampleMatrix(int n, int p, std::vector<Spin> data) : n_(n), p_(p), data_(std::move(data)) {
    if (n < 0 || p < 0) throw ArgumentError("sample matrix: negative dimension");
    if (data_.size() != std::size_t(n) * p) throw DimensionError("sample matrix: data size does not match n*p");
    for (Spin s : data_)
        if (s != 1 && s != -1) throw ArgumentError("sample matrix: entries must be ±1");
}

SampleMatrix SampleMatrix::head(int count) const {
    count = std::clamp(count, 0, n_);
    return SampleMatrix(count, p_, std::vector<Spin>(data_.begin(), data_.begin() + std::size_t(count) * p_));
}

namespace {

// Heat-bath update of site r; the same arithmetic as conditional_prob.
inline void update_site(const InteractionTensor& t, std::vector<Spin>& x, int r, double km1_fact,
                        Rng& rng) {
    double m = 0.0;
    for (int idx : t.incident(r)) {
        const Edge& e = t.edges()[idx];
        int prod = 1;
        for (int v : e.vertices)
            if (v != r) prod *= x[v];
        m += e.coef * prod;
    }
    const double p_plus = logistic(2.0 * t.k() * km1_fact * m);
    x[r] = rng.uniform() < p_plus ? Spin{1} : Spin{-1};
}

void sweep_raw(const InteractionTensor& t, std::vector<Spin>& x, Rng& rng, ScanOrder scan,
               double km1_fact) {
    const int p = t.p();
    if (scan == ScanOrder::systematic) {
        for (int r = 0; r < p; ++r) update_site(t, x, r, km1_fact, rng);
    } else {
        for (int s = 0; s < p; ++s) update_site(t, x, static_cast<int>(rng.below(p)), km1_fact, rng);
    }
}

std::vector<Spin> uniform_start(int p, Rng& rng) {
    std::vector<Spin> x(p);
    for (auto& s : x) s = static_cast<Spin>(rng.spin());
    return x;
}

} // namespace

void gibbs_sweep(const InteractionTensor& t, SpinConfiguration& x, Rng& rng, ScanOrder scan) {
    if (x.size() != t.p()) throw DimensionError("gibbs_sweep: configuration length does not match p");
    std::vector<Spin> raw(x.view().begin(), x.view().end());
    sweep_raw(t, raw, rng, scan, factorial(t.k() - 1));
    x = SpinConfiguration(std::move(raw));
}

SampleMatrix draw_samples(const InteractionTensor& t, int n, const GibbsConfig& cfg) {
    if (n < 1) throw ArgumentError("draw_samples: n must be at least 1");
    if (cfg.burn_in_sweeps < 0) throw ArgumentError("draw_samples: burn-in must be nonnegative");
    if (cfg.spacing_sweeps < 1) throw ArgumentError("draw_samples: spacing must be at least 1");
    const int p = t.p();
    const double km1 = factorial(t.k() - 1);
    Rng rng(cfg.seed);
    std::vector<Spin> data;
    data.reserve(std::size_t(n) * p);
    if (cfg.restart) {
        for (int i = 0; i < n; ++i) {
            auto x = uniform_start(p, rng);
            for (int s = 0; s < cfg.burn_in_sweeps; ++s) sweep_raw(t, x, rng, cfg.scan, km1);
            data.insert(data.end(), x.begin(), x.end());
        }
    } else {
        auto x = uniform_start(p, rng);
        for (int s = 0; s < cfg.burn_in_sweeps; ++s) sweep_raw(t, x, rng, cfg.scan, km1);
        for (int i = 0; i < n; ++i) {
            for (int s = 0; s < cfg.spacing_sweeps; ++s) sweep_raw(t, x, rng, cfg.scan, km1);
            data.insert(data.end(), x.begin(), x.end());
        }
    }
    return SampleMatrix(n, p, std::move(data));
}

SampleMatrix exact_sample(const ExactDistribution& dist, int n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("exact_sample: n must be at least 1");
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += dist.probs[i]);
    Rng rng(seed);
    std::vector<Spin> data;
    data.reserve(std::size_t(n) * dist.p);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto idx = static_cast<std::uint64_t>(it - cdf.begin());
        for (int b = 0; b < dist.p; ++b) data.push_back(((idx >> b) & 1u) ? Spin{1} : Spin{-1});
    }
    return SampleMatrix(n, dist.p, std::move(data));
}

SampleMatrix exact_sample(const InteractionTensor& t, int n, std::uint64_t seed, int cap) {
    if (n < 1) throw ArgumentError("exact_sample: n must be at least 1");
    return exact_sample(exact_distribution(t, cap), n, seed);
}

void write_samples_csv(std::ostream& os, const SampleMatrix& m) {
    for (int v = 0; v < m.p(); ++v) os << (v ? "," : "") << 's' << v;
    os << '\n';
    std::string line;
    for (int i = 0; i < m.n(); ++i) {
        line.clear();
        for (int v = 0; v < m.p(); ++v) {
            if (v) line += ',';
            line += m.at(i, v) > 0 ? "1" : "-1";
        }
        line += '\n';
        os << line;
    }
}

SampleMatrix read_samples_csv(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    int p = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        p = 0;
        while (std::getline(ss, cell, ',')) {
            if (cell != "s" + std::to_string(p))
                throw ParseError("sample header must read s0,s1,...; got '" + cell + "'", lineno);
            ++p;
        }
        break;
    }
    if (p <= 0) throw ParseError("missing sample header", lineno);
    std::vector<Spin> data;
    int n = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            if (cell == "1" || cell == "+1") data.push_back(1);
            else if (cell == "-1") data.push_back(-1);
            else throw ParseError("row " + std::to_string(n) + ": entry '" + cell + "' is not -1 or 1", lineno);
            ++cols;
        }
        if (cols != p)
            throw ParseError("row " + std::to_string(n) + ": expected " + std::to_string(p) +
                                 " entries, found " + std::to_string(cols), lineno);
        ++n;
    }
    return SampleMatrix(n, p, std::move(data));
}

void save_samples(const std::string& path, const SampleMatrix& m) {
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot open " + path + " for writing");
    write_samples_csv(os, m);
}

SampleMatrix load_samples(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot open " + path);
    return read_samples_csv(is);
}

} // namespace tising
