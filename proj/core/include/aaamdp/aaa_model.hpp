#pragma once

#include "aaamdp/aaa_states.hpp"
#include "aaamdp/mdp.hpp"
#include "aaamdp/parameters.hpp"

namespace aaamdp {

// Reward credited at the maximal age N: either the QALY weight at N for the
// states that are still alive, or zero everywhere.
enum class TerminalReward { QalyAtMaxAge, Zero };

// One year of surveillance from each state, composed from the annual event
// tree: rupture is resolved first (reach hospital, then survive emergency
// repair, into no-AAA; any other rupture outcome is death); a non-ruptured
// patient faces background mortality and survivors grow along the growth
// row. No-AAA faces background mortality only; dead is absorbing.
Matrix surveillance_transition(const ParameterSet& params, int age);

// Elective repair within the year: each diameter bin moves to no-AAA with
// probability 1 - elective_mortality(age) and to dead otherwise. The no-AAA
// and dead rows equal the surveillance rows (surgery is a no-op there).
Matrix surgery_transition(const ParameterSet& params, int age);

// QALY weight for the year: qaly_weight(age) for every alive state, zero
// for dead. Action-independent. Valid for ages M..N.
double qaly_reward(int state, int age, const ParameterSet& params);

// Assembles the full decision process: 14 states, the two actions with
// surveillance first, one transition pair per age M..N-1, rewards from
// qaly_reward, and the terminal reward per `terminal`.
DecisionProcess build_process(const ParameterSet& params,
                              TerminalReward terminal = TerminalReward::QalyAtMaxAge);

// The clinical baseline: operate iff the diameter exceeds 55 mm, at every
// age. Surveillance for dead, no-AAA and bins up through 50-55 mm.
Policy clinical_policy_55(const Horizon& horizon);

}  // namespace aaamdp
