#include "aaamdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "double_str.hpp"

namespace aaamdp {

std::string Violation::str() const {
    std::string s = path + ": " + rule;
    if (std::isnan(value) || value != 0.0) {
        s += " (value=" + detail::double_str(value) + ")";
    }
    return s;
}

std::string ValidationReport::str() const {
    std::string s;
    for (const auto& v : violations) {
        s += v.str();
        s += '\n';
    }
    return s;
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("validation failed:\n" + report.str()), report_(std::move(report)) {}

double Matrix::row_sum(int r) const {
    double sum = 0.0;
    for (int c = 0; c < cols_; ++c) sum += (*this)(r, c);
    return sum;
}

int StateSpace::index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

namespace {

void check_labels(const std::vector<std::string>& labels, const std::string& path,
                  ValidationReport& report) {
    if (labels.empty()) {
        report.add(path, "must contain at least one label");
        return;
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : labels) {
        if (label.empty()) report.add(path, "label must be non-empty");
        if (!seen.insert(label).second) report.add(path + "[" + label + "]", "duplicate label");
    }
}

std::string coord(const DecisionProcess& p, int epoch, int action, int state) {
    return "transition[k=" + std::to_string(epoch) + "][u=" + p.actions.labels[action] +
           "][i=" + p.states.labels[state] + "]";
}

}  // namespace

ValidationReport validate_process(const DecisionProcess& process) {
    ValidationReport report;

    check_labels(process.states.labels, "states.labels", report);
    check_labels(process.actions.labels, "actions.labels", report);
    if (process.horizon.start_epoch >= process.horizon.end_epoch) {
        report.add("horizon", "start_epoch must be less than end_epoch",
                   process.horizon.start_epoch);
    }
    if (!report.ok()) return report;

    const int num_states = process.states.size();
    const int num_actions = process.actions.size();
    const int num_epochs = process.horizon.num_decision_epochs();

    if (static_cast<int>(process.transition.size()) != num_epochs) {
        report.add("transition", "must cover every decision epoch",
                   static_cast<double>(process.transition.size()));
    }
    if (static_cast<int>(process.reward.size()) != num_epochs) {
        report.add("reward", "must cover every decision epoch",
                   static_cast<double>(process.reward.size()));
    }
    if (static_cast<int>(process.terminal_reward.size()) != num_states) {
        report.add("terminal_reward", "must cover every state",
                   static_cast<double>(process.terminal_reward.size()));
    }
    if (!report.ok()) return report;

    for (int e = 0; e < num_epochs; ++e) {
        const int k = process.horizon.start_epoch + e;
        if (static_cast<int>(process.transition[e].size()) != num_actions) {
            report.add("transition[k=" + std::to_string(k) + "]", "must cover every action",
                       static_cast<double>(process.transition[e].size()));
            continue;
        }
        for (int u = 0; u < num_actions; ++u) {
            const Matrix& m = process.transition[e][u];
            if (m.rows() != num_states || m.cols() != num_states) {
                report.add("transition[k=" + std::to_string(k) + "][u=" +
                               process.actions.labels[u] + "]",
                           "matrix must be square over the state space");
                continue;
            }
            for (int i = 0; i < num_states; ++i) {
                bool row_defined = true;
                for (int j = 0; j < num_states; ++j) {
                    const double p = m(i, j);
                    if (std::isnan(p)) {
                        report.add(coord(process, k, u, i), "probability is NaN", p);
                        row_defined = false;
                    } else if (p < 0.0) {
                        report.add(coord(process, k, u, i), "negative probability", p);
                    } else if (p > 1.0) {
                        report.add(coord(process, k, u, i), "probability exceeds 1", p);
                    }
                }
                if (!row_defined) continue;
                const double sum = m.row_sum(i);
                if (std::abs(sum - 1.0) > kRowSumTolerance) {
                    report.add(coord(process, k, u, i), "row does not sum to 1", sum);
                }
            }
        }
        const Matrix& r = process.reward[e];
        if (r.rows() != num_states || r.cols() != num_actions) {
            report.add("reward[k=" + std::to_string(k) + "]",
                       "matrix must be states x actions");
            continue;
        }
        for (int i = 0; i < num_states; ++i) {
            for (int u = 0; u < num_actions; ++u) {
                if (std::isnan(r(i, u))) {
                    report.add("reward[k=" + std::to_string(k) + "][u=" +
                                   process.actions.labels[u] + "][i=" +
                                   process.states.labels[i] + "]",
                               "reward is NaN", r(i, u));
                }
            }
        }
    }
    for (int i = 0; i < num_states; ++i) {
        if (std::isnan(process.terminal_reward[i])) {
            report.add("terminal_reward[i=" + process.states.labels[i] + "]",
                       "reward is NaN", process.terminal_reward[i]);
        }
    }
    return report;
}

namespace {

void require_valid(const DecisionProcess& process) {
    ValidationReport report = validate_process(process);
    if (!report.ok()) throw ValidationError(std::move(report));
}

// Backs up the value vector at epoch k for one (state, action):
//   r(i, u, k) + sum_j p_ij(u, k) * next[j]
// Both the solver and the evaluator use this so that a policy equal to the
// optimal one evaluates to bit-identical values.
double backup(const DecisionProcess& process, int epoch, int state, int action,
              const std::vector<double>& next) {
    const Matrix& m = process.transition_at(epoch, action);
    double acc = process.reward_at(epoch, state, action);
    for (int j = 0; j < process.states.size(); ++j) {
        acc += m(state, j) * next[j];
    }
    return acc;
}

}  // namespace

Solution solve_backward_induction(const DecisionProcess& process) {
    require_valid(process);

    const int num_states = process.states.size();
    const int num_actions = process.actions.size();
    const Horizon& h = process.horizon;

    ValueFunction values;
    values.horizon = h;
    values.value.assign(static_cast<std::size_t>(h.num_decision_epochs()) + 1,
                        std::vector<double>(num_states, 0.0));
    values.value.back() = process.terminal_reward;

    Policy policy;
    policy.horizon = h;
    policy.action.assign(static_cast<std::size_t>(h.num_decision_epochs()),
                         std::vector<int>(num_states, 0));

    for (int k = h.end_epoch - 1; k >= h.start_epoch; --k) {
        const std::size_t e = static_cast<std::size_t>(k - h.start_epoch);
        const std::vector<double>& next = values.value[e + 1];
        for (int i = 0; i < num_states; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            int best_action = 0;
            for (int u = 0; u < num_actions; ++u) {
                const double q = backup(process, k, i, u, next);
                // Strict improvement keeps the earliest action on ties.
                if (q > best) {
                    best = q;
                    best_action = u;
                }
            }
            values.value[e][i] = best;
            policy.action[e][i] = best_action;
        }
    }
    return {std::move(policy), std::move(values)};
}

ValueFunction evaluate_policy(const DecisionProcess& process, const Policy& policy) {
    require_valid(process);

    const int num_states = process.states.size();
    const int num_actions = process.actions.size();
    const Horizon& h = process.horizon;

    if (policy.horizon != h) {
        throw std::invalid_argument("policy horizon [" +
                                    std::to_string(policy.horizon.start_epoch) + "," +
                                    std::to_string(policy.horizon.end_epoch) +
                                    ") does not match the process horizon");
    }
    std::string missing;
    for (int k = h.start_epoch; k < h.end_epoch; ++k) {
        const std::size_t e = static_cast<std::size_t>(k - h.start_epoch);
        const bool row_ok = e < policy.action.size() &&
                            static_cast<int>(policy.action[e].size()) == num_states;
        for (int i = 0; i < num_states; ++i) {
            if (!row_ok) {
                missing += " (k=" + std::to_string(k) + ", i=" + process.states.labels[i] + ")";
            } else if (policy.action[e][i] < 0 || policy.action[e][i] >= num_actions) {
                throw std::invalid_argument(
                    "policy action " + std::to_string(policy.action[e][i]) + " at (k=" +
                    std::to_string(k) + ", i=" + process.states.labels[i] +
                    ") is not a member of the action set");
            }
        }
    }
    if (!missing.empty()) {
        throw std::invalid_argument("policy is missing entries:" + missing);
    }

    ValueFunction values;
    values.horizon = h;
    values.value.assign(static_cast<std::size_t>(h.num_decision_epochs()) + 1,
                        std::vector<double>(num_states, 0.0));
    values.value.back() = process.terminal_reward;

    for (int k = h.end_epoch - 1; k >= h.start_epoch; --k) {
        const std::size_t e = static_cast<std::size_t>(k - h.start_epoch);
        const std::vector<double>& next = values.value[e + 1];
        for (int i = 0; i < num_states; ++i) {
            values.value[e][i] = backup(process, k, i, policy.action[e][i], next);
        }
    }
    return values;
}

Solution enumerate_optimal_bruteforce(const DecisionProcess& process) {
    require_valid(process);

    const int num_states = process.states.size();
    const int num_actions = process.actions.size();
    const int num_epochs = process.horizon.num_decision_epochs();
    const int digits = num_states * num_epochs;

    // |U|^digits enumerated policies, capped at 2^24.
    if (digits * std::log2(static_cast<double>(num_actions)) > 24.0 + 1e-12) {
        throw std::invalid_argument(
            "instance too large for enumeration: " + std::to_string(num_actions) + "^" +
            std::to_string(digits) + " policies exceeds 2^24");
    }

    Policy candidate;
    candidate.horizon = process.horizon;
    candidate.action.assign(static_cast<std::size_t>(num_epochs),
                            std::vector<int>(num_states, 0));

    Solution best;
    double best_total = -std::numeric_limits<double>::infinity();
    bool done = false;
    while (!done) {
        ValueFunction values = evaluate_policy(process, candidate);
        const std::vector<double>& start = values.value.front();
        const double total = std::accumulate(start.begin(), start.end(), 0.0);
        if (total > best_total) {
            best_total = total;
            best = {candidate, std::move(values)};
        }
        // Odometer step over all (epoch, state) cells; done once every
        // digit wraps back to the first action.
        done = true;
        for (int e = 0; e < num_epochs && done; ++e) {
            for (int i = 0; i < num_states && done; ++i) {
                int& a = candidate.action[static_cast<std::size_t>(e)]
                                         [static_cast<std::size_t>(i)];
                if (++a < num_actions) {
                    done = false;
                } else {
                    a = 0;
                }
            }
        }
    }
    return best;
}

}  // namespace aaamdp
