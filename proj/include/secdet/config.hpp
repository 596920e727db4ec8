#ifndef SECDET_CONFIG_HPP
#define SECDET_CONFIG_HPP

#include <string>

#include "secdet/sim.hpp"

namespace secdet {

// JSON (de)serialization of scenario configs.  Schema:
//   pair:     {"kind":"bernoulli","p0":0.02,"p1":0.6}
//             {"kind":"gaussian_shift","a":1.0,"vbar":0.0,"sigma":1.0}
//   detector: {"kind":"secure","z_s":1.4282} | {"kind":"trimmed"} |
//             {"kind":"bayes","chi":0.0} | {"kind":"qom","q_schedule":[...]} |
//             {"kind":"secure_sensors","z_s":...,"m_s":...} |
//             {"kind":"unknown_n","z_tuple":[...]}
//   attack:   {"kind":"none"} | {"kind":"flip"} | {"kind":"rate_target","z_s":1.4282}
//   sampler:  {"kind":"plain"} | {"kind":"tilted","w":"auto"} | {"kind":"tilted","w":0.5}
// plus shape {"m","n","m_s"}, theta_mode "both"|"theta0"|"theta1",
// horizon, trials, master_seed and the optional fit_window [lo, hi]
// and threads.

DistributionPair parse_pair_json(const std::string& json_text);
DetectorSpec parse_detector_json(const std::string& json_text);
AttackSpec parse_attack_json(const std::string& json_text);
NetworkShape parse_shape_json(const std::string& json_text);
ScenarioConfig parse_scenario_json(const std::string& json_text);
ScenarioConfig load_scenario_file(const std::string& path);

std::string scenario_to_json(const ScenarioConfig& cfg);
std::string estimate_to_json(const ErrorEstimate& est, const ScenarioConfig& cfg);
std::string estimate_to_csv(const ErrorEstimate& est);

}  // namespace secdet

#endif
