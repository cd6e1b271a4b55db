#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aaamdp/aaa_model.hpp"
#include "aaamdp/mdp.hpp"
#include "aaamdp/parameters.hpp"

namespace aaamdp {

enum class GridKind { Policy, Value, Gain, Ratio };

// Lower-case name used in serialized grids: policy | value | gain | ratio.
const char* grid_kind_name(GridKind kind);

struct GridProvenance {
    std::uint64_t seed = 0;
    int replicates = 0;
    // Content digest of the parameter file the grid was computed from;
    // empty when the grid did not come from a file.
    std::string parameter_digest;

    bool operator==(const GridProvenance&) const = default;
};

// An age-by-diameter results grid: one row per decision age M..N-1, one
// column per diameter bin (value maps may prepend the no-AAA column).
// Policy cells are 0/1, ratio cells lie in [0,1].
struct GridReport {
    GridKind kind = GridKind::Policy;
    std::vector<int> ages;
    std::vector<std::string> columns;
    Matrix cells;
    GridProvenance provenance;

    int num_rows() const { return static_cast<int>(ages.size()); }
    int num_cols() const { return static_cast<int>(columns.size()); }

    bool operator==(const GridReport&) const = default;
};

// 0/1 grid over the diameter bins: 1 where the policy operates. The dead
// and no-AAA columns are excluded.
GridReport policy_grid(const Policy& policy);

// Expected remaining QALYs per (age, bin). The dead column would be
// identically zero and is excluded; the no-AAA column is optional.
GridReport qaly_map(const ValueFunction& values, bool include_no_aaa = false);

// Cellwise difference v_opt - v_base over the diameter bins. Throws
// std::invalid_argument when the two value functions disagree in shape.
GridReport qaly_gain_map(const ValueFunction& v_opt, const ValueFunction& v_base);

// Per-cell fraction of perturbed replicates whose optimal action is
// surgery. Deterministic in (params, spec): replicate r depends only on
// (spec.seed, r), and the reduction is an integer count, so any execution
// order yields the same grid.
GridReport sensitivity_ratio(const ParameterSet& params, const PerturbationSpec& spec,
                             TerminalReward terminal = TerminalReward::QalyAtMaxAge);

// Optimal policy grids after scaling the rupture probabilities of the
// given bins by each factor in turn.
std::vector<std::pair<double, GridReport>> bias_experiment(
    const ParameterSet& params, const std::vector<double>& factors,
    const std::vector<std::string>& bins,
    TerminalReward terminal = TerminalReward::QalyAtMaxAge);

// CSV with a header row ("age" plus column labels) and one row per age.
// Byte-stable: numbers are shortest round-trip decimals.
std::string to_csv(const GridReport& grid);

// JSON envelope carrying kind, provenance, labels and cells; byte-stable.
std::string to_json(const GridReport& grid);

// Parses a grid CSV written by to_csv. Policy grids must contain only 0/1
// cells; violations are reported with their (age, column) coordinates.
GridReport grid_from_csv(const std::string& csv, GridKind kind);

// Expands a 12-column policy grid back into a full policy over the model's
// states (surveillance in the dead and no-AAA states, where the action is a
// no-op). The grid must cover every age of `horizon`; missing or extra ages
// are reported in the exception.
Policy policy_from_grid(const GridReport& grid, const Horizon& horizon);

// Fixed-width text rendering: one row per age (downward), one column per
// bin (rightward), '#' where the policy operates and '.' where it
// surveils.
std::string ascii_policy_grid(const GridReport& grid);

}  // namespace aaamdp
