#include "aaamdp/aaa_model.hpp"

#include <stdexcept>
#include <unordered_map>

namespace aaamdp {

const std::vector<std::string>& aaa_state_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> all = {"dead", "no AAA"};
        const auto& bins = diameter_bin_labels();
        all.insert(all.end(), bins.begin(), bins.end());
        return all;
    }();
    return labels;
}

const std::vector<std::string>& diameter_bin_labels() {
    static const std::vector<std::string> labels = {
        "<30 mm",   "30-35 mm", "35-40 mm", "40-45 mm", "45-50 mm", "50-55 mm",
        "55-60 mm", "60-65 mm", "65-70 mm", "70-75 mm", "75-80 mm", ">80 mm"};
    return labels;
}

int diameter_bin_index(const std::string& label) {
    static const std::unordered_map<std::string, int> index = [] {
        std::unordered_map<std::string, int> m;
        const auto& bins = diameter_bin_labels();
        for (int b = 0; b < kNumDiameterBins; ++b) m[bins[b]] = b;
        return m;
    }();
    auto it = index.find(label);
    return it == index.end() ? -1 : it->second;
}

StateSpace aaa_state_space() { return StateSpace{aaa_state_labels()}; }

ActionSet aaa_action_set() {
    return ActionSet{{"continue-surveillance", "perform-surgery"}};
}

namespace {

void check_age(const ParameterSet& params, int age) {
    if (age < params.start_age() || age >= params.max_age()) {
        throw std::invalid_argument("age " + std::to_string(age) +
                                    " outside decision epochs " +
                                    std::to_string(params.start_age()) + ".." +
                                    std::to_string(params.max_age() - 1));
    }
}

}  // namespace

Matrix surveillance_transition(const ParameterSet& params, int age) {
    check_age(params, age);
    const double beta = params.background_at(age);
    const double m_em = params.emergency_at(age);
    const double h = params.reach_hospital_prob;

    Matrix t(kNumAaaStates, kNumAaaStates, 0.0);
    t(kDeadState, kDeadState) = 1.0;
    t(kNoAaaState, kDeadState) = beta;
    t(kNoAaaState, kNoAaaState) = 1.0 - beta;
    for (int b = 0; b < kNumDiameterBins; ++b) {
        const int state = bin_to_state(b);
        const double rho = params.rupture_prob[b];
        // Rupture resolves first: the patient is cured only by reaching
        // hospital and surviving emergency repair.
        t(state, kNoAaaState) = rho * h * (1.0 - m_em);
        t(state, kDeadState) = rho * ((1.0 - h) + h * m_em) + (1.0 - rho) * beta;
        for (int j = 0; j < kNumDiameterBins; ++j) {
            t(state, bin_to_state(j)) = (1.0 - rho) * (1.0 - beta) * params.growth(b, j);
        }
    }
    return t;
}

Matrix surgery_transition(const ParameterSet& params, int age) {
    check_age(params, age);
    const double beta = params.background_at(age);
    const double m_el = params.elective_at(age);

    Matrix t(kNumAaaStates, kNumAaaStates, 0.0);
    t(kDeadState, kDeadState) = 1.0;
    t(kNoAaaState, kDeadState) = beta;
    t(kNoAaaState, kNoAaaState) = 1.0 - beta;
    for (int b = 0; b < kNumDiameterBins; ++b) {
        const int state = bin_to_state(b);
        t(state, kNoAaaState) = 1.0 - m_el;
        t(state, kDeadState) = m_el;
    }
    return t;
}

double qaly_reward(int state, int age, const ParameterSet& params) {
    if (state < 0 || state >= kNumAaaStates) {
        throw std::invalid_argument("state index " + std::to_string(state) +
                                    " outside the aneurysm state space");
    }
    if (age < params.start_age() || age > params.max_age()) {
        throw std::invalid_argument("age " + std::to_string(age) + " outside " +
                                    std::to_string(params.start_age()) + ".." +
                                    std::to_string(params.max_age()));
    }
    return state == kDeadState ? 0.0 : params.qaly_at(age);
}

DecisionProcess build_process(const ParameterSet& params, TerminalReward terminal) {
    DecisionProcess p;
    p.states = aaa_state_space();
    p.actions = aaa_action_set();
    p.horizon = params.horizon;

    const int epochs = params.horizon.num_decision_epochs();
    p.transition.resize(epochs);
    p.reward.resize(epochs);
    for (int k = 0; k < epochs; ++k) {
        const int age = params.start_age() + k;
        p.transition[k] = {surveillance_transition(params, age),
                           surgery_transition(params, age)};
        Matrix r(kNumAaaStates, 2, 0.0);
        for (int i = 0; i < kNumAaaStates; ++i) {
            const double c = qaly_reward(i, age, params);
            r(i, kActionSurveillance) = c;
            r(i, kActionSurgery) = c;
        }
        p.reward[k] = std::move(r);
    }

    p.terminal_reward.assign(kNumAaaStates, 0.0);
    if (terminal == TerminalReward::QalyAtMaxAge) {
        for (int i = 0; i < kNumAaaStates; ++i) {
            p.terminal_reward[i] = qaly_reward(i, params.max_age(), params);
        }
    }
    return p;
}

Policy clinical_policy_55(const Horizon& horizon) {
    Policy policy;
    policy.horizon = horizon;
    std::vector<int> row(kNumAaaStates, kActionSurveillance);
    const int first_surgery_bin = diameter_bin_index("55-60 mm");
    for (int b = first_surgery_bin; b < kNumDiameterBins; ++b) {
        row[bin_to_state(b)] = kActionSurgery;
    }
    policy.action.assign(horizon.num_decision_epochs(), row);
    return policy;
}

}  // namespace aaamdp
