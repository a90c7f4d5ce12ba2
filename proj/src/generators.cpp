#include "tising/generators.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "tising/errors.hpp"
#include "tising/rng.hpp"

namespace tising {

std::vector<int> HypergraphSupport::degrees() const {
    std::vector<int> deg(p, 0);
    for (const auto& e : edges)
        for (int v : e) ++deg[v];
    return deg;
}

HypergraphSupport regular_hypergraph(int p, int k, int d, std::uint64_t seed, int max_attempts) {
    if (k < 2 || k > p) throw ArgumentError("regular_hypergraph: need 2 <= k <= p");
    if (d < 1) throw ArgumentError("regular_hypergraph: d must be at least 1");
    if ((static_cast<std::int64_t>(p) * d) % k != 0)
        throw ArgumentError("regular_hypergraph: p*d = " + std::to_string(p * d) + " is not divisible by k = " +
                            std::to_string(k));
    if (binomial(p - 1, k - 1) < static_cast<std::uint64_t>(d))
        throw ArgumentError("regular_hypergraph: degree d exceeds C(p-1, k-1)");

    Rng rng(seed);
    std::vector<int> stubs;
    stubs.reserve(std::size_t(p) * d);
    for (int v = 0; v < p; ++v)
        for (int j = 0; j < d; ++j) stubs.push_back(v);

    const int groups = static_cast<int>(stubs.size()) / k;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        rng.shuffle(stubs.begin(), stubs.end());
        std::set<Subset> seen;
        bool ok = true;
        for (int g = 0; g < groups && ok; ++g) {
            Subset e(stubs.begin() + g * k, stubs.begin() + (g + 1) * k);
            std::sort(e.begin(), e.end());
            ok = std::adjacent_find(e.begin(), e.end()) == e.end() && seen.insert(std::move(e)).second;
        }
        if (!ok) continue;
        HypergraphSupport h{p, k, {seen.begin(), seen.end()}};
        const auto deg = h.degrees();
        if (static_cast<int>(h.edges.size()) != groups ||
            std::any_of(deg.begin(), deg.end(), [d](int x) { return x != d; }))
            throw GenerationError("regular_hypergraph: internal degree check failed");
        return h;
    }
    throw GenerationError("regular_hypergraph: no simple pairing found in " + std::to_string(max_attempts) +
                          " attempts; try a larger p or a smaller d");
}

double default_coupling(int k) { return 0.5 / factorial(k); }

InteractionTensor assign_coefficients(const HypergraphSupport& support, const CoefficientScheme& scheme) {
    const double mag = scheme.magnitude == 0.0 ? default_coupling(support.k) : scheme.magnitude;
    if (!(mag > 0.0) || !std::isfinite(mag)) throw ArgumentError("assign_coefficients: magnitude must be positive");
    Rng rng(scheme.seed);
    std::map<Subset, double> map;
    for (const auto& e : support.edges) {
        const double s = scheme.sign_mode == SignMode::rademacher ? rng.spin() : 1.0;
        map.emplace(e, s * mag);
    }
    return InteractionTensor(support.p, support.k, map);
}

std::int64_t scaling_n(double alpha, int p, int k, int d, double divisor) {
    if (!(alpha > 0.0) || !(divisor > 0.0) || d < 1 || k < 2 || p <= k)
        throw ArgumentError("scaling_n: α, divisor and d must be positive, with 2 <= k < p");
    const double kf = factorial(k);
    const double v = alpha * std::pow(kf, 8) * std::pow(double(d), 3) * log_binomial(p - 1, k - 1) / divisor;
    // Guard against values a hair above an integer from rounding.
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-12 * std::max(1.0, r)) return static_cast<std::int64_t>(std::max(1.0, r));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

GraphEdges read_edge_list(std::istream& is) {
    GraphEdges out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long long u = 0, v = 0;
        std::string rest;
        if (!(ls >> u >> v) || (ls >> rest)) throw ParseError("expected `u v`", lineno);
        if (u < 0 || v < 0 || u > 1'000'000'000 || v > 1'000'000'000)
            throw ParseError("vertex ids must be nonnegative integers", lineno);
        if (u == v) throw ParseError("self-loop", lineno);
        out.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    return out;
}

HypergraphSupport triangles_from_graph(const GraphEdges& edges) {
    int p = 0;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0) throw ArgumentError("triangles_from_graph: negative vertex");
        if (u == v) throw ArgumentError("triangles_from_graph: self-loop");
        p = std::max({p, u + 1, v + 1});
    }
    // Higher-numbered neighbors only, sorted and deduplicated.
    std::vector<std::vector<int>> up(p);
    for (auto [u, v] : edges) up[std::min(u, v)].push_back(std::max(u, v));
    for (auto& a : up) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    HypergraphSupport h{p, 3, {}};
    for (int a = 0; a < p; ++a)
        for (std::size_t i = 0; i < up[a].size(); ++i) {
            const int b = up[a][i];
            std::vector<int> common;
            std::set_intersection(up[a].begin() + i + 1, up[a].end(), up[b].begin(), up[b].end(),
                                  std::back_inserter(common));
            for (int c : common) h.edges.push_back({a, b, c});
        }
    return h;
}

Series read_series_csv(std::istream& is) {
    Series s;
    std::string line;
    int lineno = 0;
    bool first = true;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            std::size_t used = 0;
            try {
                row.push_back(std::stod(c, &used));
                if (c.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (first) {
            first = false;
            s.columns.resize(cells.size());
            if (!numeric) continue;
        }
        if (!numeric) throw ParseError("non-numeric value", lineno);
        if (row.size() != s.columns.size())
            throw ParseError("expected " + std::to_string(s.columns.size()) + " columns, found " +
                                 std::to_string(row.size()),
                             lineno);
        for (std::size_t j = 0; j < row.size(); ++j) s.columns[j].push_back(row[j]);
    }
    if (s.columns.empty()) throw ArgumentError("series CSV is empty");
    return s;
}

SampleMatrix binarize_series(const Series& series, int thin) {
    if (thin < 1) throw ArgumentError("binarize_series: thin must be at least 1");
    if (series.columns.empty()) throw ArgumentError("binarize_series: no nodes");
    const auto len = series.columns.front().size();
    for (const auto& c : series.columns)
        if (c.size() != len) throw DimensionError("binarize_series: series lengths differ");
    if (len < 2) throw ArgumentError("binarize_series: need at least 2 time points");

    const int p = static_cast<int>(series.columns.size());
    std::vector<std::size_t> kept;
    for (std::size_t t = 0; t + 1 < len; ++t) {
        bool zero = false;
        for (const auto& c : series.columns) zero = zero || c[t + 1] - c[t] == 0.0;
        if (!zero) kept.push_back(t);
    }
    std::vector<std::size_t> thinned;
    for (std::size_t j = 0; j < kept.size(); ++j)
        if ((j + 1) % std::size_t(thin) == 0) thinned.push_back(kept[j]);
    if (thinned.empty())
        throw ArgumentError("binarize_series: no time points left after dropping zero differences and thinning");

    SampleMatrix out(static_cast<int>(thinned.size()), p);
    for (std::size_t i = 0; i < thinned.size(); ++i) {
        auto row = out.row(static_cast<int>(i));
        const auto t = thinned[i];
        for (int v = 0; v < p; ++v) row[v] = series.columns[v][t + 1] > series.columns[v][t] ? 1 : -1;
    }
    return out;
}

void write_hypergraph(std::ostream& os, const HypergraphSupport& h) {
    os << "#hypergraph p=" << h.p << " k=" << h.k << '\n';
    for (const auto& e : h.edges) {
        for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
        os << '\n';
    }
}

} // namespace tising
