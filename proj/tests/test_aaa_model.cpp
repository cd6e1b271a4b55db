#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "aaamdp/aaa_model.hpp"
#include "aaamdp/parameters.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace aaamdp;
using namespace aaamdp::testsupport;

namespace {

const std::filesystem::path kDefaultParams =
    std::filesystem::path(AAAMDP_DATA_DIR) / "aaa_default_params.json";

}  // namespace

TEST_CASE("the state space lists dead, no AAA, then the twelve bins") {
    const StateSpace states = aaa_state_space();
    REQUIRE(states.size() == 14);
    CHECK(states.labels[kDeadState] == "dead");
    CHECK(states.labels[kNoAaaState] == "no AAA");
    CHECK(states.labels[kFirstBinState] == "<30 mm");
    CHECK(states.labels[7] == "50-55 mm");
    CHECK(states.labels[13] == ">80 mm");
    CHECK(diameter_bin_index("<30 mm") == 0);
    CHECK(diameter_bin_index(">80 mm") == 11);
    CHECK(diameter_bin_index("80 mm") == -1);
    CHECK(aaa_action_set().labels ==
          std::vector<std::string>{"continue-surveillance", "perform-surgery"});
}

TEST_CASE("surveillance composes the annual event tree") {
    // rho=0.1, h=0.5, emergency mortality 0.2, background 0.05, growth
    // identity: stay 0.855, cure 0.04, die 0.105.
    const ParameterSet p = uniform_parameters(65, 70, 0.1, 0.8, 0.05, 0.03, 0.2, 0.5);
    const Matrix t = surveillance_transition(p, 67);

    for (int b = 0; b < kNumDiameterBins; ++b) {
        const int state = bin_to_state(b);
        CHECK(t(state, kNoAaaState) == doctest::Approx(0.04).epsilon(1e-12));
        CHECK(t(state, kDeadState) == doctest::Approx(0.105).epsilon(1e-12));
        CHECK(t(state, state) == doctest::Approx(0.855).epsilon(1e-12));
        CHECK(t.row_sum(state) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(t(kDeadState, kDeadState) == 1.0);
    CHECK(t(kNoAaaState, kDeadState) == 0.05);
    CHECK(t(kNoAaaState, kNoAaaState) == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("surveillance rows match independent event-tree enumeration") {
    std::mt19937_64 eng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const ParameterSet p = random_parameter_set(eng);
        const int age = p.start_age() + static_cast<int>(eng() % p.horizon.num_decision_epochs());
        const Matrix t = surveillance_transition(p, age);
        for (int b = 0; b < kNumDiameterBins; ++b) {
            std::vector<double> growth_row(kNumDiameterBins);
            for (int j = 0; j < kNumDiameterBins; ++j) growth_row[j] = p.growth(b, j);
            const std::vector<double> expected = event_tree_surveillance_row(
                p.rupture_prob[b], p.reach_hospital_prob, p.emergency_at(age),
                p.background_at(age), growth_row);
            for (int j = 0; j < kNumAaaStates; ++j) {
                CHECK(t(bin_to_state(b), j) == doctest::Approx(expected[j]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("surgery sends every bin to no AAA or dead") {
    ParameterSet p = uniform_parameters(65, 70, 0.1, 0.8, 0.05, 0.03, 0.2, 0.5);
    Matrix t = surgery_transition(p, 66);
    for (int b = 0; b < kNumDiameterBins; ++b) {
        CHECK(t(bin_to_state(b), kNoAaaState) == doctest::Approx(0.97).epsilon(1e-15));
        CHECK(t(bin_to_state(b), kDeadState) == 0.03);
    }

    // Free surgery: certain cure.
    p.elective_mortality.assign(p.elective_mortality.size(), 0.0);
    t = surgery_transition(p, 66);
    for (int b = 0; b < kNumDiameterBins; ++b) {
        CHECK(t(bin_to_state(b), kNoAaaState) == 1.0);
    }

    // Surgery is a no-op for the dead and no-AAA rows.
    const Matrix s = surveillance_transition(p, 66);
    for (int j = 0; j < kNumAaaStates; ++j) {
        CHECK(t(kDeadState, j) == s(kDeadState, j));
        CHECK(t(kNoAaaState, j) == s(kNoAaaState, j));
    }
}

TEST_CASE("transition builders reject out-of-horizon ages") {
    const ParameterSet p = uniform_parameters(65, 70, 0.1, 0.8, 0.05, 0.03, 0.2, 0.5);
    CHECK_THROWS_AS(surveillance_transition(p, 64), std::invalid_argument);
    CHECK_THROWS_AS(surveillance_transition(p, 70), std::invalid_argument);
    CHECK_THROWS_AS(surgery_transition(p, 71), std::invalid_argument);
}

TEST_CASE("rewards depend only on being alive") {
    const ParameterSet p = load_parameters(kDefaultParams);
    CHECK(qaly_reward(kDeadState, 70, p) == 0.0);
    CHECK(qaly_reward(kNoAaaState, 70, p) == p.qaly_at(70));
    CHECK(qaly_reward(bin_to_state(diameter_bin_index("50-55 mm")), 70, p) ==
          qaly_reward(kNoAaaState, 70, p));
    CHECK(qaly_reward(kNoAaaState, 120, p) == p.qaly_at(120));
    CHECK_THROWS_AS(qaly_reward(14, 70, p), std::invalid_argument);
    CHECK_THROWS_AS(qaly_reward(1, 121, p), std::invalid_argument);
}

TEST_CASE("build_process assembles a valid process from any valid parameters") {
    std::mt19937_64 eng(71);
    for (int trial = 0; trial < 5; ++trial) {
        const ParameterSet p = random_parameter_set(eng);
        const DecisionProcess process = build_process(p);
        CHECK(validate_process(process).ok());
        CHECK(process.horizon == p.horizon);
        CHECK(process.states.size() == kNumAaaStates);
        CHECK(process.actions.size() == 2);

        const int age = p.start_age() + static_cast<int>(eng() % p.horizon.num_decision_epochs());
        CHECK(process.transition_at(age, kActionSurveillance) == surveillance_transition(p, age));
        CHECK(process.transition_at(age, kActionSurgery) == surgery_transition(p, age));
        CHECK(process.reward_at(age, kDeadState, kActionSurgery) == 0.0);
        CHECK(process.reward_at(age, kNoAaaState, kActionSurveillance) == p.qaly_at(age));
    }
}

TEST_CASE("terminal reward honors the configuration") {
    const ParameterSet p = load_parameters(kDefaultParams);

    const DecisionProcess qaly = build_process(p, TerminalReward::QalyAtMaxAge);
    CHECK(qaly.terminal_reward[kDeadState] == 0.0);
    CHECK(qaly.terminal_reward[kNoAaaState] == p.qaly_at(120));
    CHECK(qaly.terminal_reward[bin_to_state(0)] == p.qaly_at(120));

    const DecisionProcess zero = build_process(p, TerminalReward::Zero);
    for (int i = 0; i < kNumAaaStates; ++i) CHECK(zero.terminal_reward[i] == 0.0);
}

TEST_CASE("the 55 mm policy operates on exactly the six largest bins") {
    const Horizon horizon{65, 120};
    const Policy policy = clinical_policy_55(horizon);
    REQUIRE(policy.horizon == horizon);
    REQUIRE(policy.action.size() == 55);
    for (int k = horizon.start_epoch; k < horizon.end_epoch; ++k) {
        CHECK(policy.action_at(k, kDeadState) == kActionSurveillance);
        CHECK(policy.action_at(k, kNoAaaState) == kActionSurveillance);
        for (int b = 0; b < kNumDiameterBins; ++b) {
            const int expected =
                b >= diameter_bin_index("55-60 mm") ? kActionSurgery : kActionSurveillance;
            CHECK(policy.action_at(k, bin_to_state(b)) == expected);
        }
    }
}

TEST_CASE("no-AAA dominates every diameter bin when repair cannot beat ordinary living") {
    // Aneurysm states face the no-AAA hazards plus rupture and repair risk,
    // so no-AAA carries the highest value -- provided neither repair pathway
    // is safer than a plain year of background mortality. (An elective
    // mortality below the background rate would make the operating year a
    // shelter, and a bin could then outvalue no-AAA.)
    std::mt19937_64 eng(83);
    for (int trial = 0; trial < 10; ++trial) {
        ParameterSet p = random_parameter_set(eng);
        for (std::size_t t = 0; t < p.background_mortality.size(); ++t) {
            p.elective_mortality[t] =
                std::max(p.elective_mortality[t], p.background_mortality[t]);
            p.emergency_mortality[t] =
                std::max(p.emergency_mortality[t], p.background_mortality[t]);
        }
        const Solution s = solve_backward_induction(build_process(p));
        for (int k = p.start_age(); k <= p.max_age(); ++k) {
            for (int b = 0; b < kNumDiameterBins; ++b) {
                CHECK(s.values.at(k, kNoAaaState) >= s.values.at(k, bin_to_state(b)) - 1e-12);
            }
        }
    }
}

TEST_CASE("free surgery makes operating optimal before the final epoch") {
    // Elective repair is free; rupture risk is real; emergency rescue is
    // imperfect. Surgery dominates in every bin until the last epoch.
    const ParameterSet p = uniform_parameters(65, 80, 0.2, 0.8, 0.05, 0.0, 0.5, 0.5);
    const Solution s = solve_backward_induction(build_process(p));
    for (int k = 65; k < 79; ++k) {
        for (int b = 0; b < kNumDiameterBins; ++b) {
            CHECK(s.policy.action_at(k, bin_to_state(b)) == kActionSurgery);
        }
    }
}

TEST_CASE("zero rupture risk makes surveillance optimal everywhere") {
    // No rupture hazard and costly surgery: operating only adds mortality.
    const ParameterSet p = uniform_parameters(65, 90, 0.0, 0.8, 0.02, 0.05, 0.5, 0.5);
    const Solution s = solve_backward_induction(build_process(p));
    for (int k = 65; k < 90; ++k) {
        for (int b = 0; b < kNumDiameterBins; ++b) {
            CHECK(s.policy.action_at(k, bin_to_state(b)) == kActionSurveillance);
        }
    }
}

TEST_CASE("the solved model evaluates its own policy bit-identically") {
    const ParameterSet p = load_parameters(kDefaultParams);
    const DecisionProcess process = build_process(p);
    const Solution s = solve_backward_induction(process);
    CHECK(evaluate_policy(process, s.policy) == s.values);
}
