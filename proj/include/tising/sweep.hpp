#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tising/generators.hpp"
#include "tising/nodewise.hpp"
#include "tising/recovery.hpp"
#include "tising/sampler.hpp"

namespace tising {

enum class SamplerKind { gibbs, exact };

struct SweepConfig {
    std::vector<int> p_list{32};
    int k = 3;
    int d = 3;
    std::vector<double> alpha_grid; // either this ...
    std::vector<int> n_grid;        // ... or this
    int trials = 50;
    double divisor = kRateDivisor;
    LambdaSpec lambda;
    AggregationRule rule;
    std::uint64_t base_seed = 0;
    int workers = 0; // 0: OpenMP default
    double coupling = 0.0; // 0: 0.5 / k!
    SignMode sign_mode = SignMode::all_plus;
    SamplerKind sampler = SamplerKind::gibbs;
    int burn_in_sweeps = 1000;
    int spacing_sweeps = 5;
    SolveOptions solve;

    /// Throws ArgumentError on an unusable configuration.
    void validate() const;
    int grid_size() const;
};

struct GridPoint {
    int p = 0;
    double alpha = 0.0; // for n grids: the α implied by n and the divisor
    std::int64_t n = 0;
};

/// One (grid point, trial) cell. On failure `status` names the error class and
/// the metric fields are unset.
struct SweepRow {
    int grid_index = 0;
    GridPoint point;
    int k = 0;
    int d = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::string message;
    std::optional<double> recovery_rate;
    std::optional<bool> success;
    std::optional<bool> success_unsigned;
    std::optional<int> false_positives;
    std::optional<double> lambda_used;
    double wall_seconds = 0.0;
};

struct SweepSummary {
    GridPoint point;
    int ok = 0;
    int failed = 0;
    double mean_rate = 0.0;
    double success_fraction = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // ordered by (grid_index, trial)
    std::vector<SweepSummary> summary;
};

std::vector<GridPoint> grid_points(const SweepConfig& cfg);

/// splitmix64(base ^ (grid_index * 10^9 + trial)).
std::uint64_t trial_seed(std::uint64_t base, int grid_index, int trial);

/// Generates, samples, fits and scores one trial. Throws on any stage error.
SweepRow run_trial(const SweepConfig& cfg, int grid_index, const GridPoint& point, int trial);

/// Runs the whole lattice with trials as the parallel unit. Stage errors are
/// recorded per row and never abort the sweep.
SweepResult run_sweep(const SweepConfig& cfg);

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

inline constexpr const char* kSweepCsvVersion = "# tising-sweep v1";

/// Schedule-independent columns only; wall times go to write_timing_csv.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& is);
void write_summary_csv(std::ostream& os, const std::vector<SweepSummary>& summary);
void write_timing_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Keys mirror SweepConfig; absent keys keep the values already in `cfg`.
void apply_json(SweepConfig& cfg, const nlohmann::json& j);

/// Shortest round-trip decimal form, identical across runs and platforms.
std::string format_number(double v);

} // namespace tising
