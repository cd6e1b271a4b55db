#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aaamdp/aaa_states.hpp"
#include "aaamdp/mdp.hpp"
#include "aaamdp/validation.hpp"

namespace aaamdp {

// All clinical inputs of the aneurysm model, keyed by diameter bin and age.
// Ages run from horizon.start_epoch (start age M) to horizon.end_epoch
// (maximal age N); decision epochs are M..N-1. Age-indexed vectors store
// age M at index 0.
struct ParameterSet {
    Horizon horizon;

    // Annual rupture probability per diameter bin.
    std::vector<double> rupture_prob;
    // Row-stochastic annual growth matrix over diameter bins; rows assign no
    // mass to strictly smaller bins (aneurysms do not shrink).
    Matrix growth;
    // QALYs credited for one year alive at each age; covers M..N so the
    // terminal year has a weight.
    std::vector<double> qaly_weight;
    // Annual probabilities per age, covering M..N-1.
    std::vector<double> background_mortality;
    std::vector<double> elective_mortality;
    std::vector<double> emergency_mortality;
    // Probability that a ruptured patient reaches hospital alive.
    double reach_hospital_prob = 0.0;

    // Free-form note carried through load/save round trips.
    std::string description;

    int start_age() const { return horizon.start_epoch; }
    int max_age() const { return horizon.end_epoch; }

    double qaly_at(int age) const { return qaly_weight[age - start_age()]; }
    double background_at(int age) const { return background_mortality[age - start_age()]; }
    double elective_at(int age) const { return elective_mortality[age - start_age()]; }
    double emergency_at(int age) const { return emergency_mortality[age - start_age()]; }
};

// Canonical family names, as used in parameter files and width specs.
const std::vector<std::string>& parameter_families();

// Checks every ParameterSet invariant: probability ranges, age and bin
// coverage, growth row sums, and the no-shrinkage constraint. Empty report
// iff the set is valid.
ValidationReport validate_parameters(const ParameterSet& params);

// Loads a parameter file. Parse failures report the byte position; schema
// and validation failures raise a ValidationError naming every offending
// entry. Missing ages or bins are errors, never silently defaulted.
ParameterSet load_parameters(const std::filesystem::path& path);

// Canonical serialization; load(save(p)) is value-identical to p.
std::string save_parameters(const ParameterSet& params);
void save_parameters(const ParameterSet& params, const std::filesystem::path& path);
ParameterSet parse_parameters(const std::string& text, const std::string& origin = "<string>");

// Relative-width perturbation applied per parameter family. A width of w
// for a family draws each entry uniformly from [nominal*(1-w), nominal*(1+w)],
// clamped back to its legal range; growth rows are renormalized afterwards.
// Families absent from `widths` keep width 0 and pass through untouched.
struct PerturbationSpec {
    std::map<std::string, double> widths;
    int replicates = 1;
    std::uint64_t seed = 0;

    double width_for(const std::string& family) const;
};

// Deterministic function of (params, spec.seed, replicate): the same pair
// always yields the same draw. Throws std::invalid_argument for an invalid
// spec or a replicate outside {0, ..., replicates-1}.
ParameterSet perturb_parameters(const ParameterSet& params, const PerturbationSpec& spec,
                                int replicate);

// Multiplies the rupture probability of each named bin by `factor`
// (clamped to [0,1]); everything else is untouched. Throws
// std::invalid_argument for a negative factor or an unknown bin label.
ParameterSet scale_rupture_bias(const ParameterSet& params, double factor,
                                const std::vector<std::string>& bins);

}  // namespace aaamdp
