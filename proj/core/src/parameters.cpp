#include "aaamdp/parameters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace aaamdp {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& parameter_families() {
    static const std::vector<std::string> families = {
        "rupture_prob",       "growth",
        "qaly_weight",        "background_mortality",
        "elective_mortality", "emergency_mortality",
        "reach_hospital_prob"};
    return families;
}

double PerturbationSpec::width_for(const std::string& family) const {
    auto it = widths.find(family);
    return it == widths.end() ? 0.0 : it->second;
}

namespace {

void check_prob(double v, const std::string& path, ValidationReport& report) {
    if (std::isnan(v)) {
        report.add(path, "value is NaN", v);
    } else if (v < 0.0 || v > 1.0) {
        report.add(path, "probability outside [0,1]", v);
    }
}

}  // namespace

ValidationReport validate_parameters(const ParameterSet& p) {
    ValidationReport report;
    const auto& bins = diameter_bin_labels();

    if (p.horizon.start_epoch >= p.horizon.end_epoch) {
        report.add("horizon", "start_age must be less than max_age",
                   p.horizon.start_epoch);
        return report;
    }
    const int num_ages = p.horizon.num_decision_epochs();

    bool sized = true;
    auto check_size = [&](std::size_t actual, int expected, const std::string& path) {
        if (static_cast<int>(actual) != expected) {
            report.add(path, "must cover " + std::to_string(expected) + " entries",
                       static_cast<double>(actual));
            sized = false;
        }
    };
    check_size(p.rupture_prob.size(), kNumDiameterBins, "rupture_prob");
    if (p.growth.rows() != kNumDiameterBins || p.growth.cols() != kNumDiameterBins) {
        report.add("growth", "must be a square matrix over the diameter bins");
        sized = false;
    }
    check_size(p.qaly_weight.size(), num_ages + 1, "qaly_weight");
    check_size(p.background_mortality.size(), num_ages, "background_mortality");
    check_size(p.elective_mortality.size(), num_ages, "elective_mortality");
    check_size(p.emergency_mortality.size(), num_ages, "emergency_mortality");
    if (!sized) return report;

    for (int b = 0; b < kNumDiameterBins; ++b) {
        check_prob(p.rupture_prob[b], "rupture_prob[" + bins[b] + "]", report);
    }
    for (int i = 0; i < kNumDiameterBins; ++i) {
        for (int j = 0; j < kNumDiameterBins; ++j) {
            const double g = p.growth(i, j);
            check_prob(g, "growth[" + bins[i] + "][" + bins[j] + "]", report);
            if (j < i && g > 0.0) {
                report.add("growth[" + bins[i] + "][" + bins[j] + "]",
                           "mass on a smaller bin (aneurysms do not shrink)", g);
            }
        }
        const double sum = p.growth.row_sum(i);
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            report.add("growth[" + bins[i] + "]", "row does not sum to 1", sum);
        }
    }
    for (int age = p.start_age(); age <= p.max_age(); ++age) {
        const double c = p.qaly_at(age);
        if (std::isnan(c) || c < 0.0) {
            report.add("qaly_weight[age=" + std::to_string(age) + "]",
                       "must be a non-negative number", c);
        }
    }
    for (int age = p.start_age(); age < p.max_age(); ++age) {
        const std::string suffix = "[age=" + std::to_string(age) + "]";
        check_prob(p.background_at(age), "background_mortality" + suffix, report);
        check_prob(p.elective_at(age), "elective_mortality" + suffix, report);
        check_prob(p.emergency_at(age), "emergency_mortality" + suffix, report);
    }
    check_prob(p.reach_hospital_prob, "reach_hospital_prob", report);
    return report;
}

namespace {

double read_number(const json& value, const std::string& path, ValidationReport& report) {
    if (!value.is_number()) {
        report.add(path, "must be a number");
        return 0.0;
    }
    return value.get<double>();
}

std::vector<double> read_bin_map(const json& family, const std::string& name,
                                 ValidationReport& report) {
    const auto& bins = diameter_bin_labels();
    std::vector<double> out(kNumDiameterBins, 0.0);
    if (!family.is_object()) {
        report.add(name, "must be an object keyed by diameter bin");
        return out;
    }
    for (const auto& [key, value] : family.items()) {
        if (diameter_bin_index(key) < 0) {
            report.add(name + "[" + key + "]", "unknown diameter bin");
        }
    }
    for (int b = 0; b < kNumDiameterBins; ++b) {
        const std::string path = name + "[" + bins[b] + "]";
        if (!family.contains(bins[b])) {
            report.add(path, "missing entry");
            continue;
        }
        out[b] = read_number(family[bins[b]], path, report);
    }
    return out;
}

Matrix read_growth(const json& family, ValidationReport& report) {
    const auto& bins = diameter_bin_labels();
    Matrix out(kNumDiameterBins, kNumDiameterBins, 0.0);
    if (!family.is_object()) {
        report.add("growth", "must be an object keyed by diameter bin");
        return out;
    }
    for (const auto& [key, value] : family.items()) {
        if (diameter_bin_index(key) < 0) {
            report.add("growth[" + key + "]", "unknown diameter bin");
        }
    }
    for (int i = 0; i < kNumDiameterBins; ++i) {
        const std::string row_path = "growth[" + bins[i] + "]";
        if (!family.contains(bins[i])) {
            report.add(row_path, "missing entry");
            continue;
        }
        const json& row = family[bins[i]];
        if (!row.is_object()) {
            report.add(row_path, "must be an object keyed by destination bin");
            continue;
        }
        // Absent destinations carry probability zero.
        for (const auto& [key, value] : row.items()) {
            const int j = diameter_bin_index(key);
            if (j < 0) {
                report.add(row_path + "[" + key + "]", "unknown diameter bin");
                continue;
            }
            out(i, j) = read_number(value, row_path + "[" + key + "]", report);
        }
    }
    return out;
}

std::vector<double> read_age_map(const json& family, const std::string& name, int first_age,
                                 int last_age, ValidationReport& report) {
    std::vector<double> out(static_cast<std::size_t>(last_age - first_age) + 1, 0.0);
    if (!family.is_object()) {
        report.add(name, "must be an object keyed by integer age");
        return out;
    }
    for (const auto& [key, value] : family.items()) {
        int age = 0;
        const char* end = key.data() + key.size();
        auto [ptr, ec] = std::from_chars(key.data(), end, age);
        if (ec != std::errc() || ptr != end) {
            report.add(name + "[" + key + "]", "age key must be an integer");
        } else if (age < first_age || age > last_age) {
            report.add(name + "[" + key + "]",
                       "age outside " + std::to_string(first_age) + ".." +
                           std::to_string(last_age));
        }
    }
    for (int age = first_age; age <= last_age; ++age) {
        const std::string key = std::to_string(age);
        const std::string path = name + "[age=" + key + "]";
        if (!family.contains(key)) {
            report.add(path, "missing entry");
            continue;
        }
        out[age - first_age] = read_number(family[key], path, report);
    }
    return out;
}

}  // namespace

ParameterSet parse_parameters(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(origin + ": parse failure: " + e.what());
    }

    ValidationReport report;
    if (!j.is_object()) {
        report.add(origin, "top level must be an object");
        throw ValidationError(std::move(report));
    }

    static const std::set<std::string> known = {
        "schema_version",     "description",
        "horizon",            "reach_hospital_prob",
        "rupture_prob",       "growth",
        "qaly_weight",        "background_mortality",
        "elective_mortality", "emergency_mortality"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) report.add(key, "unknown parameter family");
    }

    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != 1) {
        report.add("schema_version", "must be the integer 1");
    }

    const json& h = j.contains("horizon") ? j["horizon"] : json();
    if (!h.is_object() || !h.contains("start_age") || !h["start_age"].is_number_integer() ||
        !h.contains("max_age") || !h["max_age"].is_number_integer()) {
        report.add("horizon", "must be an object with integer start_age and max_age");
        throw ValidationError(std::move(report));
    }
    const int start_age = h["start_age"].get<int>();
    const int max_age = h["max_age"].get<int>();
    if (start_age >= max_age) {
        report.add("horizon", "start_age must be less than max_age");
        throw ValidationError(std::move(report));
    }

    ParameterSet p;
    p.horizon = {start_age, max_age};
    if (j.contains("description")) {
        if (j["description"].is_string()) {
            p.description = j["description"].get<std::string>();
        } else {
            report.add("description", "must be a string");
        }
    }

    auto family = [&](const char* name) -> const json& {
        static const json missing;
        if (!j.contains(name)) {
            report.add(name, "missing parameter family");
            return missing;
        }
        return j[name];
    };

    p.rupture_prob = read_bin_map(family("rupture_prob"), "rupture_prob", report);
    p.growth = read_growth(family("growth"), report);
    p.qaly_weight = read_age_map(family("qaly_weight"), "qaly_weight", start_age, max_age, report);
    p.background_mortality = read_age_map(family("background_mortality"), "background_mortality",
                                          start_age, max_age - 1, report);
    p.elective_mortality = read_age_map(family("elective_mortality"), "elective_mortality",
                                        start_age, max_age - 1, report);
    p.emergency_mortality = read_age_map(family("emergency_mortality"), "emergency_mortality",
                                         start_age, max_age - 1, report);
    if (j.contains("reach_hospital_prob")) {
        p.reach_hospital_prob = read_number(j["reach_hospital_prob"], "reach_hospital_prob", report);
    } else {
        report.add("reach_hospital_prob", "missing parameter family");
    }

    if (report.ok()) {
        ValidationReport invariants = validate_parameters(p);
        report.violations.insert(report.violations.end(), invariants.violations.begin(),
                                 invariants.violations.end());
    }
    if (!report.ok()) throw ValidationError(std::move(report));
    return p;
}

ParameterSet load_parameters(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open parameter file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_parameters(buf.str(), path.string());
}

std::string save_parameters(const ParameterSet& p) {
    const auto& bins = diameter_bin_labels();
    ordered_json j;
    j["schema_version"] = 1;
    if (!p.description.empty()) j["description"] = p.description;
    j["horizon"]["start_age"] = p.start_age();
    j["horizon"]["max_age"] = p.max_age();
    j["reach_hospital_prob"] = p.reach_hospital_prob;

    ordered_json rupture;
    for (int b = 0; b < kNumDiameterBins; ++b) rupture[bins[b]] = p.rupture_prob[b];
    j["rupture_prob"] = std::move(rupture);

    ordered_json growth;
    for (int i = 0; i < kNumDiameterBins; ++i) {
        ordered_json row;
        for (int jj = 0; jj < kNumDiameterBins; ++jj) {
            if (p.growth(i, jj) != 0.0) row[bins[jj]] = p.growth(i, jj);
        }
        growth[bins[i]] = std::move(row);
    }
    j["growth"] = std::move(growth);

    auto age_map = [&](const std::vector<double>& values, int first_age) {
        ordered_json m;
        for (std::size_t i = 0; i < values.size(); ++i) {
            m[std::to_string(first_age + static_cast<int>(i))] = values[i];
        }
        return m;
    };
    j["qaly_weight"] = age_map(p.qaly_weight, p.start_age());
    j["background_mortality"] = age_map(p.background_mortality, p.start_age());
    j["elective_mortality"] = age_map(p.elective_mortality, p.start_age());
    j["emergency_mortality"] = age_map(p.emergency_mortality, p.start_age());
    return j.dump(2) + "\n";
}

void save_parameters(const ParameterSet& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write parameter file: " + path.string());
    }
    out << save_parameters(p);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0,1) from the engine's top 53 bits; avoids the
// implementation-defined behavior of std::uniform_real_distribution so
// draws are identical everywhere.
double u01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform on [nominal*(1-width), nominal*(1+width)], clamped to [lo, hi].
double perturbed(std::mt19937_64& eng, double nominal, double width, double lo, double hi) {
    const double factor = 1.0 - width + u01(eng) * 2.0 * width;
    return std::clamp(nominal * factor, lo, hi);
}

void check_spec(const PerturbationSpec& spec, int replicate) {
    for (const auto& [family, width] : spec.widths) {
        const auto& families = parameter_families();
        if (std::find(families.begin(), families.end(), family) == families.end()) {
            throw std::invalid_argument("unknown parameter family in width spec: " + family);
        }
        if (!(width >= 0.0)) {
            throw std::invalid_argument("perturbation width for " + family +
                                        " must be non-negative");
        }
    }
    if (spec.replicates < 1) {
        throw std::invalid_argument("replicate count must be at least 1");
    }
    if (replicate < 0 || replicate >= spec.replicates) {
        throw std::invalid_argument("replicate " + std::to_string(replicate) +
                                    " outside {0,...," + std::to_string(spec.replicates - 1) +
                                    "}");
    }
}

}  // namespace

ParameterSet perturb_parameters(const ParameterSet& params, const PerturbationSpec& spec,
                                int replicate) {
    check_spec(spec, replicate);

    ParameterSet out = params;
    std::mt19937_64 eng(
        splitmix64(spec.seed ^ splitmix64(0x9e3779b97f4a7c15ULL +
                                          static_cast<std::uint64_t>(replicate))));

    // Families are consumed in a fixed canonical order so that a draw
    // depends only on (seed, replicate) and the width spec.
    if (const double w = spec.width_for("rupture_prob"); w > 0.0) {
        for (int b = 0; b < kNumDiameterBins; ++b) {
            out.rupture_prob[b] = perturbed(eng, params.rupture_prob[b], w, 0.0, 1.0);
        }
    }
    if (const double w = spec.width_for("growth"); w > 0.0) {
        for (int i = 0; i < kNumDiameterBins; ++i) {
            double sum = 0.0;
            for (int j = i; j < kNumDiameterBins; ++j) {
                const double g = std::max(0.0, params.growth(i, j) *
                                                   (1.0 - w + u01(eng) * 2.0 * w));
                out.growth(i, j) = g;
                sum += g;
            }
            if (sum > 0.0) {
                for (int j = i; j < kNumDiameterBins; ++j) out.growth(i, j) /= sum;
            } else {
                for (int j = i; j < kNumDiameterBins; ++j) out.growth(i, j) = params.growth(i, j);
            }
        }
    }
    if (const double w = spec.width_for("qaly_weight"); w > 0.0) {
        for (auto& c : out.qaly_weight) {
            const double nominal = c;
            c = std::max(0.0, nominal * (1.0 - w + u01(eng) * 2.0 * w));
        }
    }
    if (const double w = spec.width_for("background_mortality"); w > 0.0) {
        for (auto& v : out.background_mortality) v = perturbed(eng, v, w, 0.0, 1.0);
    }
    if (const double w = spec.width_for("elective_mortality"); w > 0.0) {
        for (auto& v : out.elective_mortality) v = perturbed(eng, v, w, 0.0, 1.0);
    }
    if (const double w = spec.width_for("emergency_mortality"); w > 0.0) {
        for (auto& v : out.emergency_mortality) v = perturbed(eng, v, w, 0.0, 1.0);
    }
    if (const double w = spec.width_for("reach_hospital_prob"); w > 0.0) {
        out.reach_hospital_prob = perturbed(eng, params.reach_hospital_prob, w, 0.0, 1.0);
    }
    return out;
}

ParameterSet scale_rupture_bias(const ParameterSet& params, double factor,
                                const std::vector<std::string>& bins) {
    if (!(factor >= 0.0)) {
        throw std::invalid_argument("bias factor must be non-negative");
    }
    ParameterSet out = params;
    for (const auto& label : bins) {
        const int b = diameter_bin_index(label);
        if (b < 0) {
            throw std::invalid_argument("unknown diameter bin: " + label);
        }
        out.rupture_prob[b] = std::min(1.0, params.rupture_prob[b] * factor);
    }
    return out;
}

}  // namespace aaamdp
