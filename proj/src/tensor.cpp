#include "tising/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "tising/errors.hpp"
#include "tising/kernels.hpp"

namespace tising {

SpinConfiguration::SpinConfiguration(std::vector<Spin> spins) : spins_(std::move(spins)) {
    for (Spin s : spins_)
        if (s != 1 && s != -1) throw ArgumentError("spin configuration entries must be ±1");
}

SpinConfiguration SpinConfiguration::from_index(std::uint64_t index, int p) {
    std::vector<Spin> s(p);
    for (int b = 0; b < p; ++b) s[b] = ((index >> b) & 1u) ? 1 : -1;
    return SpinConfiguration(std::move(s));
}

std::uint64_t SpinConfiguration::index() const {
    std::uint64_t idx = 0;
    for (int b = 0; b < size(); ++b)
        if (spins_[b] > 0) idx |= (std::uint64_t{1} << b);
    return idx;
}

InteractionTensor::InteractionTensor(int p, int k, const std::map<Subset, double>& edges)
    : p_(p), k_(k) {
    if (p < 3) throw ArgumentError("tensor: p must be at least 3");
    if (k < 2 || k > p - 1) throw ArgumentError("tensor: need 2 <= k <= p-1");
    if (k > kMaxOrder) throw ArgumentError("tensor: k above supported maximum");
    if (p < 4) std::clog << "warning: p=" << p << " is below the p >= 4 range the recovery theory covers\n";
    edges_.reserve(edges.size());
    for (const auto& [e, c] : edges) {
        if (static_cast<int>(e.size()) != k) throw ArgumentError("tensor: edge of wrong order");
        if (!is_strictly_increasing(e)) throw ArgumentError("tensor: edge vertices must be strictly increasing");
        if (e.front() < 0 || e.back() >= p) throw ArgumentError("tensor: edge vertex out of range");
        if (!std::isfinite(c) || c == 0.0) throw ArgumentError("tensor: coefficients must be finite and nonzero");
        edges_.push_back({e, c});
    }
    incidence_ = rebuild_incidence();
}

std::vector<std::vector<int>> InteractionTensor::rebuild_incidence() const {
    std::vector<std::vector<int>> inc(p_);
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i)
        for (int v : edges_[i].vertices) inc[v].push_back(i);
    return inc;
}

double InteractionTensor::coefficient(const Subset& e) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e,
                               [](const Edge& a, const Subset& b) { return a.vertices < b; });
    return (it != edges_.end() && it->vertices == e) ? it->coef : 0.0;
}

std::map<Subset, double> InteractionTensor::edge_map() const {
    std::map<Subset, double> m;
    for (const auto& e : edges_) m.emplace(e.vertices, e.coef);
    return m;
}

std::map<Subset, double> InteractionTensor::neighborhood(int r) const {
    if (r < 0 || r >= p_) throw ArgumentError("vertex out of range");
    std::map<Subset, double> m;
    for (int idx : incidence_[r]) m.emplace(remove_vertex(edges_[idx].vertices, r), edges_[idx].coef);
    return m;
}

InteractionTensor InteractionTensor::relabeled(std::span<const int> perm) const {
    if (static_cast<int>(perm.size()) != p_) throw DimensionError("relabel: permutation size");
    std::map<Subset, double> m;
    for (const auto& e : edges_) {
        Subset s;
        for (int v : e.vertices) s.push_back(perm[v]);
        std::sort(s.begin(), s.end());
        m.emplace(std::move(s), e.coef);
    }
    return InteractionTensor(p_, k_, m);
}

namespace {

void check_length(const InteractionTensor& t, std::span<const Spin> x) {
    if (static_cast<int>(x.size()) != t.p())
        throw DimensionError("configuration length " + std::to_string(x.size()) +
                             " does not match p=" + std::to_string(t.p()));
}

} // namespace

double hamiltonian(const InteractionTensor& t, std::span<const Spin> x) {
    check_length(t, x);
    double h = 0.0;
    for (const auto& e : t.edges()) {
        int prod = 1;
        for (int v : e.vertices) prod *= x[v];
        h += e.coef * prod;
    }
    return factorial(t.k()) * h;
}

double hamiltonian(const InteractionTensor& t, const SpinConfiguration& x) {
    return hamiltonian(t, x.view());
}

double local_field(const InteractionTensor& t, std::span<const Spin> x, int r) {
    check_length(t, x);
    if (r < 0 || r >= t.p()) throw ArgumentError("local_field: vertex out of range");
    double m = 0.0;
    for (int idx : t.incident(r)) {
        const Edge& e = t.edges()[idx];
        int prod = 1;
        for (int v : e.vertices)
            if (v != r) prod *= x[v];
        m += e.coef * prod;
    }
    return factorial(t.k() - 1) * m;
}

double local_field(const InteractionTensor& t, const SpinConfiguration& x, int r) {
    return local_field(t, x.view(), r);
}

double logistic(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double conditional_prob(const InteractionTensor& t, const SpinConfiguration& x, int r, int s) {
    if (s != 1 && s != -1) throw ArgumentError("conditional_prob: spin must be ±1");
    const double a = 2.0 * t.k() * local_field(t, x, r);
    // The smaller of the two probabilities is computed directly and the other
    // as its complement, so the pair sums to exactly 1.
    const double small = logistic(-std::abs(a));
    const bool s_is_likely = (a >= 0) == (s > 0);
    return s_is_likely ? 1.0 - small : small;
}

ExactDistribution exact_distribution(const InteractionTensor& t, int cap) {
    if (t.p() > cap)
        throw CapacityError("exact enumeration refused: p=" + std::to_string(t.p()) +
                            " exceeds the enumeration cap of " + std::to_string(cap) + " vertices");
    ExactDistribution d;
    d.p = t.p();
    d.probs.assign(std::size_t{1} << t.p(), 0.0);
    kernels::parallel::state_hamiltonians(t, d.probs);
    const double hmax = *std::max_element(d.probs.begin(), d.probs.end());
    for (double& v : d.probs) v = std::exp(v - hmax);
    const double z = kernels::parallel::ordered_sum(d.probs);
    for (double& v : d.probs) v /= z;
    d.log_z = hmax + std::log(z);
    return d;
}

double exact_moment(const ExactDistribution& dist, const Subset& subset) {
    std::uint64_t mask = 0;
    for (int v : subset) {
        if (v < 0 || v >= dist.p) throw ArgumentError("exact_moment: subset vertex out of range");
        if (mask & (std::uint64_t{1} << v)) throw ArgumentError("exact_moment: repeated vertex");
        mask |= std::uint64_t{1} << v;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        // product of spins over the subset is -1 iff an odd number are -1.
        const int minus = std::popcount(static_cast<std::uint64_t>(~i) & mask);
        acc += (minus & 1) ? -dist.probs[i] : dist.probs[i];
    }
    return acc;
}

double exact_moment(const InteractionTensor& t, const Subset& subset, int cap) {
    for (int v : subset)
        if (v < 0 || v >= t.p()) throw ArgumentError("exact_moment: subset vertex out of range");
    return exact_moment(exact_distribution(t, cap), subset);
}

DegreeSummary degrees(const InteractionTensor& t) {
    DegreeSummary d;
    d.per_vertex.resize(t.p());
    for (int v = 0; v < t.p(); ++v) {
        d.per_vertex[v] = static_cast<int>(t.incident(v).size());
        d.max = std::max(d.max, d.per_vertex[v]);
    }
    return d;
}

void write_tensor(std::ostream& os, const InteractionTensor& t) {
    os << "#tensor p=" << t.p() << " k=" << t.k() << "\n";
    for (const auto& e : t.edges()) {
        for (int v : e.vertices) os << v << ' ';
        os << std::setprecision(17) << e.coef << "\n";
    }
}

InteractionTensor read_tensor(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    int p = -1, k = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (std::sscanf(line.c_str(), "#tensor p=%d k=%d", &p, &k) != 2)
            throw ParseError("expected header '#tensor p=<p> k=<k>'", lineno);
        break;
    }
    if (p < 0) throw ParseError("missing '#tensor' header", lineno);
    std::map<Subset, double> edges;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ss(line);
        Subset e(std::max(k, 0));
        for (int& v : e)
            if (!(ss >> v)) throw ParseError("expected " + std::to_string(k) + " vertex indices", lineno);
        double c;
        if (!(ss >> c)) throw ParseError("missing coefficient", lineno);
        std::string extra;
        if (ss >> extra) throw ParseError("trailing tokens", lineno);
        if (!is_strictly_increasing(e)) throw ParseError("vertices must be strictly increasing", lineno);
        for (int v : e)
            if (v < 0 || v >= p) throw ParseError("vertex out of range", lineno);
        if (!std::isfinite(c) || c == 0.0) throw ParseError("coefficient must be finite and nonzero", lineno);
        if (!edges.emplace(e, c).second) throw ParseError("duplicate edge", lineno);
    }
    return InteractionTensor(p, k, edges);
}

void save_tensor(const std::string& path, const InteractionTensor& t) {
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot open " + path + " for writing");
    write_tensor(os, t);
}

InteractionTensor load_tensor(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot open " + path);
    return read_tensor(is);
}

} // namespace tising
