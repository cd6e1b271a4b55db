#include "aaamdp/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <sstream>
#include <stdexcept>

#include "double_str.hpp"
#include "json.hpp"

namespace aaamdp {

const char* grid_kind_name(GridKind kind) {
    switch (kind) {
        case GridKind::Policy: return "policy";
        case GridKind::Value: return "value";
        case GridKind::Gain: return "gain";
        case GridKind::Ratio: return "ratio";
    }
    return "unknown";
}

namespace {

std::vector<int> decision_ages(const Horizon& horizon) {
    std::vector<int> ages(static_cast<std::size_t>(horizon.num_decision_epochs()));
    for (std::size_t i = 0; i < ages.size(); ++i) {
        ages[i] = horizon.start_epoch + static_cast<int>(i);
    }
    return ages;
}

void check_aaa_shape(const Horizon& horizon, std::size_t states, const char* what) {
    if (states != static_cast<std::size_t>(kNumAaaStates)) {
        throw std::invalid_argument(std::string(what) + " covers " + std::to_string(states) +
                                    " states, expected " + std::to_string(kNumAaaStates));
    }
    if (horizon.num_decision_epochs() < 1) {
        throw std::invalid_argument(std::string(what) + " has an empty horizon");
    }
}

}  // namespace

GridReport policy_grid(const Policy& policy) {
    if (policy.action.empty()) {
        throw std::invalid_argument("policy has no decision epochs");
    }
    check_aaa_shape(policy.horizon, policy.action.front().size(), "policy");

    GridReport grid;
    grid.kind = GridKind::Policy;
    grid.ages = decision_ages(policy.horizon);
    grid.columns = diameter_bin_labels();
    grid.cells = Matrix(grid.num_rows(), kNumDiameterBins, 0.0);
    for (int row = 0; row < grid.num_rows(); ++row) {
        for (int b = 0; b < kNumDiameterBins; ++b) {
            const int u = policy.action_at(grid.ages[row], bin_to_state(b));
            grid.cells(row, b) = u == kActionSurgery ? 1.0 : 0.0;
        }
    }
    return grid;
}

GridReport qaly_map(const ValueFunction& values, bool include_no_aaa) {
    if (values.value.empty()) {
        throw std::invalid_argument("value function has no epochs");
    }
    check_aaa_shape(values.horizon, values.value.front().size(), "value function");

    GridReport grid;
    grid.kind = GridKind::Value;
    grid.ages = decision_ages(values.horizon);
    if (include_no_aaa) grid.columns.push_back("no AAA");
    const auto& bins = diameter_bin_labels();
    grid.columns.insert(grid.columns.end(), bins.begin(), bins.end());
    grid.cells = Matrix(grid.num_rows(), grid.num_cols(), 0.0);
    for (int row = 0; row < grid.num_rows(); ++row) {
        int col = 0;
        if (include_no_aaa) grid.cells(row, col++) = values.at(grid.ages[row], kNoAaaState);
        for (int b = 0; b < kNumDiameterBins; ++b) {
            grid.cells(row, col++) = values.at(grid.ages[row], bin_to_state(b));
        }
    }
    return grid;
}

GridReport qaly_gain_map(const ValueFunction& v_opt, const ValueFunction& v_base) {
    if (v_opt.horizon != v_base.horizon) {
        throw std::invalid_argument("gain map requires matching horizons");
    }
    if (v_opt.value.empty() || v_opt.value.front().size() != v_base.value.front().size()) {
        throw std::invalid_argument("gain map requires matching state spaces");
    }
    check_aaa_shape(v_opt.horizon, v_opt.value.front().size(), "value function");

    GridReport grid;
    grid.kind = GridKind::Gain;
    grid.ages = decision_ages(v_opt.horizon);
    grid.columns = diameter_bin_labels();
    grid.cells = Matrix(grid.num_rows(), kNumDiameterBins, 0.0);
    for (int row = 0; row < grid.num_rows(); ++row) {
        for (int b = 0; b < kNumDiameterBins; ++b) {
            const int state = bin_to_state(b);
            grid.cells(row, b) =
                v_opt.at(grid.ages[row], state) - v_base.at(grid.ages[row], state);
        }
    }
    return grid;
}

GridReport sensitivity_ratio(const ParameterSet& params, const PerturbationSpec& spec,
                             TerminalReward terminal) {
    const int n = spec.replicates;
    const int num_ages = params.horizon.num_decision_epochs();
    std::vector<long long> surgery_count(
        static_cast<std::size_t>(num_ages) * kNumDiameterBins, 0);

    // Replicate r depends only on (seed, r); the counts are integers, so
    // the grid is independent of the order replicates are processed in.
    for (int r = 0; r < n; ++r) {
        try {
            const ParameterSet drawn = perturb_parameters(params, spec, r);
            const Solution solution = solve_backward_induction(build_process(drawn, terminal));
            for (int k = 0; k < num_ages; ++k) {
                const int age = params.start_age() + k;
                for (int b = 0; b < kNumDiameterBins; ++b) {
                    if (solution.policy.action_at(age, bin_to_state(b)) == kActionSurgery) {
                        ++surgery_count[static_cast<std::size_t>(k) * kNumDiameterBins + b];
                    }
                }
            }
        } catch (const std::invalid_argument&) {
            throw;  // a bad spec is the caller's error, not the replicate's
        } catch (const std::exception& e) {
            throw std::runtime_error("sensitivity replicate " + std::to_string(r) + ": " +
                                     e.what());
        }
    }

    GridReport grid;
    grid.kind = GridKind::Ratio;
    grid.ages = decision_ages(params.horizon);
    grid.columns = diameter_bin_labels();
    grid.cells = Matrix(num_ages, kNumDiameterBins, 0.0);
    for (int k = 0; k < num_ages; ++k) {
        for (int b = 0; b < kNumDiameterBins; ++b) {
            grid.cells(k, b) =
                static_cast<double>(surgery_count[static_cast<std::size_t>(k) * kNumDiameterBins + b]) /
                static_cast<double>(n);
        }
    }
    grid.provenance.seed = spec.seed;
    grid.provenance.replicates = n;
    return grid;
}

std::vector<std::pair<double, GridReport>> bias_experiment(
    const ParameterSet& params, const std::vector<double>& factors,
    const std::vector<std::string>& bins, TerminalReward terminal) {
    std::vector<std::pair<double, GridReport>> out;
    out.reserve(factors.size());
    for (const double factor : factors) {
        const ParameterSet scaled = scale_rupture_bias(params, factor, bins);
        const Solution solution = solve_backward_induction(build_process(scaled, terminal));
        out.emplace_back(factor, policy_grid(solution.policy));
    }
    return out;
}

std::string to_csv(const GridReport& grid) {
    std::string out = "age";
    for (const auto& column : grid.columns) {
        out += ',';
        out += column;
    }
    out += '\n';
    for (int row = 0; row < grid.num_rows(); ++row) {
        out += std::to_string(grid.ages[row]);
        for (int col = 0; col < grid.num_cols(); ++col) {
            out += ',';
            out += detail::double_str(grid.cells(row, col));
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const GridReport& grid) {
    nlohmann::ordered_json j;
    j["kind"] = grid_kind_name(grid.kind);
    j["seed"] = grid.provenance.seed;
    j["replicates"] = grid.provenance.replicates;
    j["parameter_digest"] = grid.provenance.parameter_digest;
    j["columns"] = grid.columns;
    j["ages"] = grid.ages;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (int row = 0; row < grid.num_rows(); ++row) {
        nlohmann::ordered_json line = nlohmann::ordered_json::array();
        for (int col = 0; col < grid.num_cols(); ++col) line.push_back(grid.cells(row, col));
        cells.push_back(std::move(line));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_cell(const std::string& text, const std::string& where) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::runtime_error(where + ": not a number: '" + text + "'");
    }
    return value;
}

}  // namespace

GridReport grid_from_csv(const std::string& csv, GridKind kind) {
    std::vector<std::string> lines;
    {
        std::istringstream in(csv);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) lines.push_back(line);
        }
    }
    if (lines.empty()) throw std::runtime_error("grid CSV is empty");

    const auto header = split_csv_line(lines.front());
    if (header.size() < 2 || header.front() != "age") {
        throw std::runtime_error("grid CSV header must start with 'age' followed by columns");
    }

    GridReport grid;
    grid.kind = kind;
    grid.columns.assign(header.begin() + 1, header.end());
    const int num_cols = grid.num_cols();
    const int num_rows = static_cast<int>(lines.size()) - 1;
    grid.cells = Matrix(num_rows, num_cols, 0.0);
    for (int row = 0; row < num_rows; ++row) {
        const auto fields = split_csv_line(lines[static_cast<std::size_t>(row) + 1]);
        if (static_cast<int>(fields.size()) != num_cols + 1) {
            throw std::runtime_error("grid CSV row " + std::to_string(row + 2) + " has " +
                                     std::to_string(fields.size() - 1) + " cells, expected " +
                                     std::to_string(num_cols));
        }
        const double age = parse_cell(fields[0], "grid CSV row " + std::to_string(row + 2));
        grid.ages.push_back(static_cast<int>(age));
        for (int col = 0; col < num_cols; ++col) {
            const std::string where =
                "cell (age=" + fields[0] + ", " + grid.columns[col] + ")";
            const double value = parse_cell(fields[static_cast<std::size_t>(col) + 1], where);
            if (kind == GridKind::Policy && value != 0.0 && value != 1.0) {
                throw std::runtime_error(where + ": policy cells must be 0 or 1, got '" +
                                         fields[static_cast<std::size_t>(col) + 1] + "'");
            }
            grid.cells(row, col) = value;
        }
    }
    return grid;
}

Policy policy_from_grid(const GridReport& grid, const Horizon& horizon) {
    if (grid.columns != diameter_bin_labels()) {
        throw std::invalid_argument("policy grid columns must be the 12 diameter bins");
    }
    std::vector<std::string> problems;
    std::vector<int> row_for_age(static_cast<std::size_t>(horizon.num_decision_epochs()), -1);
    for (int row = 0; row < grid.num_rows(); ++row) {
        const int age = grid.ages[row];
        if (!horizon.is_decision_epoch(age)) {
            problems.push_back("unexpected age " + std::to_string(age));
            continue;
        }
        auto& slot = row_for_age[static_cast<std::size_t>(age - horizon.start_epoch)];
        if (slot >= 0) {
            problems.push_back("duplicate age " + std::to_string(age));
        } else {
            slot = row;
        }
    }
    for (int k = horizon.start_epoch; k < horizon.end_epoch; ++k) {
        if (row_for_age[static_cast<std::size_t>(k - horizon.start_epoch)] < 0) {
            problems.push_back("missing age " + std::to_string(k));
        }
    }
    if (!problems.empty()) {
        std::string message = "policy grid does not cover the horizon:";
        for (const auto& p : problems) message += " " + p + ";";
        message.pop_back();
        throw std::invalid_argument(message);
    }

    Policy policy;
    policy.horizon = horizon;
    policy.action.assign(row_for_age.size(),
                         std::vector<int>(kNumAaaStates, kActionSurveillance));
    for (std::size_t k = 0; k < row_for_age.size(); ++k) {
        const int row = row_for_age[k];
        for (int b = 0; b < kNumDiameterBins; ++b) {
            policy.action[k][static_cast<std::size_t>(bin_to_state(b))] =
                grid.cells(row, b) == 1.0 ? kActionSurgery : kActionSurveillance;
        }
    }
    return policy;
}

std::string ascii_policy_grid(const GridReport& grid) {
    std::string out = "      '#' = perform-surgery, '.' = continue-surveillance\n";
    out += "      columns: " + grid.columns.front() + " .. " + grid.columns.back() + "\n";
    for (int row = 0; row < grid.num_rows(); ++row) {
        std::string age = std::to_string(grid.ages[row]);
        out += std::string(4 - std::min<std::size_t>(4, age.size()), ' ') + age + "  ";
        for (int col = 0; col < grid.num_cols(); ++col) {
            out += grid.cells(row, col) != 0.0 ? '#' : '.';
        }
        out += '\n';
    }
    return out;
}

}  // namespace aaamdp
