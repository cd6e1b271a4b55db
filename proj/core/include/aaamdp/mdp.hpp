#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "aaamdp/validation.hpp"

namespace aaamdp {

// Dense row-major matrix. Small enough models that nothing fancier is needed.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }
    double operator()(int r, int c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }

    double row_sum(int r) const;

    bool operator==(const Matrix&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Ordered collection of named states. Indexes are positions in `labels`.
struct StateSpace {
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(labels.size()); }

    // Index of `label`, or -1 if absent.
    int index_of(const std::string& label) const;
};

// Ordered collection of named actions. The ordering matters: the solver
// breaks value ties in favor of the earliest action.
struct ActionSet {
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(labels.size()); }
};

// Decision epochs are {start_epoch, ..., end_epoch - 1}; end_epoch is
// terminal-only (no action is taken there).
struct Horizon {
    int start_epoch = 0;
    int end_epoch = 0;

    int num_decision_epochs() const { return end_epoch - start_epoch; }

    bool is_decision_epoch(int k) const { return k >= start_epoch && k < end_epoch; }

    bool operator==(const Horizon&) const = default;
};

// A finite-horizon, time-inhomogeneous MDP.
//
//   transition[k - start][u](i, j)  = P[x_{k+1} = j | x_k = i, u_k = u]
//   reward[k - start](i, u)         = reward for applying u in state i at epoch k
//   terminal_reward[i]              = reward collected at end_epoch (action-free)
struct DecisionProcess {
    StateSpace states;
    ActionSet actions;
    Horizon horizon;
    std::vector<std::vector<Matrix>> transition;
    std::vector<Matrix> reward;
    std::vector<double> terminal_reward;

    const Matrix& transition_at(int epoch, int action) const {
        return transition[static_cast<std::size_t>(epoch - horizon.start_epoch)]
                         [static_cast<std::size_t>(action)];
    }
    double reward_at(int epoch, int state, int action) const {
        return reward[static_cast<std::size_t>(epoch - horizon.start_epoch)](state, action);
    }
};

// Deterministic Markov policy: action[k - start][i] is the action index
// chosen in state i at decision epoch k.
struct Policy {
    Horizon horizon;
    std::vector<std::vector<int>> action;

    int action_at(int epoch, int state) const {
        return action[static_cast<std::size_t>(epoch - horizon.start_epoch)]
                     [static_cast<std::size_t>(state)];
    }

    bool operator==(const Policy&) const = default;
};

// Expected remaining reward per (epoch, state); covers every epoch from
// start_epoch through end_epoch inclusive.
struct ValueFunction {
    Horizon horizon;
    std::vector<std::vector<double>> value;

    double at(int epoch, int state) const {
        return value[static_cast<std::size_t>(epoch - horizon.start_epoch)]
                    [static_cast<std::size_t>(state)];
    }

    bool operator==(const ValueFunction&) const = default;
};

struct Solution {
    Policy policy;
    ValueFunction values;
};

// Absolute tolerance for row-stochasticity checks. Parameter files carry few
// significant digits, so a tighter tolerance would reject legitimate input.
inline constexpr double kRowSumTolerance = 1e-9;

// Checks every structural invariant of `process`: per-(epoch, action) row
// sums within kRowSumTolerance of 1, probabilities in [0, 1], no missing
// epochs or misshapen matrices, no NaN rewards. Always returns a report;
// the report is empty iff the process is valid.
ValidationReport validate_process(const DecisionProcess& process);

// Exact backward induction. Returns the optimal policy and the value of
// every (epoch, state), with ties between equally valued actions resolved
// toward the earliest action in ActionSet order.
//
// Throws ValidationError if validate_process(process) is non-empty.
Solution solve_backward_induction(const DecisionProcess& process);

// Value of a fixed policy via the exact recursion (no sampling).
// Throws ValidationError for an invalid process and std::invalid_argument
// if the policy is missing an (epoch, state) entry or maps outside the
// action set.
ValueFunction evaluate_policy(const DecisionProcess& process, const Policy& policy);

// Test oracle: enumerates every deterministic Markov policy, evaluates each
// with evaluate_policy, and returns one maximizing the summed start-epoch
// value. Throws std::invalid_argument when the instance exceeds the
// enumeration guard of 2^24 policies.
Solution enumerate_optimal_bruteforce(const DecisionProcess& process);

}  // namespace aaamdp
