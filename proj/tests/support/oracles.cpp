#include "support/oracles.hpp"

#include "aaamdp/aaa_states.hpp"

namespace aaamdp::testsupport {

namespace {

void walk(const DecisionProcess& process, const Policy& policy, int epoch, int state,
          double prob, double reward_so_far, double& total) {
    if (epoch == process.horizon.end_epoch) {
        total += prob * (reward_so_far + process.terminal_reward[static_cast<std::size_t>(state)]);
        return;
    }
    const int action = policy.action_at(epoch, state);
    const double reward = reward_so_far + process.reward_at(epoch, state, action);
    const Matrix& t = process.transition_at(epoch, action);
    for (int next = 0; next < process.states.size(); ++next) {
        if (t(state, next) > 0.0) {
            walk(process, policy, epoch + 1, next, prob * t(state, next), reward, total);
        }
    }
}

}  // namespace

double trajectory_enumeration_value(const DecisionProcess& process, const Policy& policy,
                                    int start_state) {
    double total = 0.0;
    walk(process, policy, process.horizon.start_epoch, start_state, 1.0, 0.0, total);
    return total;
}

std::vector<double> event_tree_surveillance_row(double rupture, double reach_hospital,
                                                double emergency_mortality,
                                                double background_mortality,
                                                const std::vector<double>& growth_row) {
    std::vector<double> row(kNumAaaStates, 0.0);
    // Leaf: rupture, reach hospital, survive emergency repair.
    row[kNoAaaState] += rupture * reach_hospital * (1.0 - emergency_mortality);
    // Leaf: rupture, reach hospital, die in emergency repair.
    row[kDeadState] += rupture * reach_hospital * emergency_mortality;
    // Leaf: rupture, never reach hospital.
    row[kDeadState] += rupture * (1.0 - reach_hospital);
    // Leaf: no rupture, die of background causes.
    row[kDeadState] += (1.0 - rupture) * background_mortality;
    // Leaves: no rupture, survive the year, grow along the growth row.
    for (int j = 0; j < kNumDiameterBins; ++j) {
        row[static_cast<std::size_t>(bin_to_state(j))] +=
            (1.0 - rupture) * (1.0 - background_mortality) * growth_row[static_cast<std::size_t>(j)];
    }
    return row;
}

}  // namespace aaamdp::testsupport
