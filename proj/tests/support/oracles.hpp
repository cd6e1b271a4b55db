#pragma once

#include <vector>

#include "aaamdp/mdp.hpp"
#include "aaamdp/parameters.hpp"

namespace aaamdp::testsupport {

// Independent check of evaluate_policy: exhaustively enumerates every
// trajectory through the horizon, accumulating path probability and summed
// reward per path, and returns the probability-weighted total. Exponential
// in the horizon; use on tiny models only.
double trajectory_enumeration_value(const DecisionProcess& process, const Policy& policy,
                                    int start_state);

// Independent composition of one surveillance row by enumerating the
// annual event tree leaf by leaf (rupture -> hospital -> emergency repair;
// no rupture -> background death -> growth). Returns a full row over the
// model's states.
std::vector<double> event_tree_surveillance_row(double rupture, double reach_hospital,
                                                double emergency_mortality,
                                                double background_mortality,
                                                const std::vector<double>& growth_row);

}  // namespace aaamdp::testsupport
