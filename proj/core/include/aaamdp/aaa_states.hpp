#pragma once

#include <string>
#include <vector>

#include "aaamdp/mdp.hpp"

namespace aaamdp {

// State layout for the aneurysm model: the absorbing dead state, the
// post-repair no-AAA state, then twelve aneurysm diameter bins from
// "<30 mm" up to ">80 mm" in 5 mm steps.
inline constexpr int kDeadState = 0;
inline constexpr int kNoAaaState = 1;
inline constexpr int kFirstBinState = 2;
inline constexpr int kNumDiameterBins = 12;
inline constexpr int kNumAaaStates = kFirstBinState + kNumDiameterBins;

// Surveillance is listed first so that value ties resolve to
// non-intervention.
inline constexpr int kActionSurveillance = 0;
inline constexpr int kActionSurgery = 1;

// The 14 state labels, dead first.
const std::vector<std::string>& aaa_state_labels();

// The 12 diameter-bin labels, smallest first.
const std::vector<std::string>& diameter_bin_labels();

// Index into diameter_bin_labels(), or -1 for an unknown label.
int diameter_bin_index(const std::string& label);

inline int bin_to_state(int bin) { return kFirstBinState + bin; }
inline int state_to_bin(int state) { return state - kFirstBinState; }

StateSpace aaa_state_space();
ActionSet aaa_action_set();

}  // namespace aaamdp
