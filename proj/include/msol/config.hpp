#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msol/currents.hpp"
#include "msol/dualform.hpp"
#include "msol/dynamics.hpp"
#include "msol/forms.hpp"
#include "msol/smeasure.hpp"
#include "msol/solenoid.hpp"

namespace msol {

using Json = nlohmann::ordered_json;

// Descriptor parsers. Every error is a ConfigError naming the dotted path of
// the offending field under `path`.
TransversalSpace parse_transversal(const Json& j, const std::string& path);
ReturnMap parse_map(const Json& j, const std::string& path);
TransversalPoint parse_point(const Json& j, const TransversalSpace& space, const std::string& path);
RawTransversalMeasure parse_raw_measure(const Json& j, const TransversalSpace& space, const std::string& path);
SolenoidMeasure parse_solenoid_measure(const Json& j, const SuspensionSolenoid& sol, const std::string& path);
Immersion parse_immersion(const Json& j, const SuspensionSolenoid& sol, const std::string& path);
TorusForm parse_form(const Json& j, int n, const std::string& path);

Json to_json(const TransversalSpace& space);
Json to_json(const ReturnMap& map);
Json to_json(const TransversalSpace& space, const TransversalPoint& pt);
Json to_json(const RawTransversalMeasure& m);
Json to_json(const TrigPoly& p);
Json to_json(const Immersion& imm);
Json to_json(const TorusForm& w);

struct RandomForms {
  std::size_t count = 0;
  int cap = 8;
  std::size_t terms = 6;
};

struct MinimalityOptions {
  std::size_t samples = 8;
  std::size_t n_steps = 10000;
  double eps = 0.01;
};

struct ExperimentConfig {
  SuspensionSolenoid solenoid{TransversalSpace::circle(), ReturnMap::rotation(0.0)};
  std::optional<RawTransversalMeasure> measure;
  std::optional<SolenoidMeasure> solenoid_measure;
  std::optional<Immersion> immersion;
  std::vector<NamedForm> forms;
  RandomForms random_forms;
  QuadOptions quad;
  UlamOptions ulam;
  MinimalityOptions minimality;
  int grid = 256;
  double r = 0.02;
  double r_prime = 0.01;
  int refinements = 2;
  double samples_per_radius = DualFormOptions{}.samples_per_radius;
  std::vector<int> flowbox_depths{4, 5, 6, 7, 8};
  double horizon = 1e4;
  std::optional<TransversalPoint> x0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output = "out";
  bool fail_on_atoms = false;

  /// Input with every default the run uses filled in.
  Json echo;
};

/// Parses a full experiment config. The transversal measure defaults to the
/// first invariant measure of the map; the immersion to the standard one of
/// the family (rotation_standard on circles, dyadic_r3 on 2-adic spaces).
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& file);

/// Transversal measure of a config after the invariance check (DomainError
/// becomes ConfigError on "measure").
TransversalMeasureInv resolve_measure(const ExperimentConfig& cfg);
Immersion resolve_immersion(const ExperimentConfig& cfg);
/// Explicit forms followed by `random_forms.count` seeded exact forms
/// d(eta), named exact_0, exact_1, ...
std::vector<NamedForm> resolve_forms(const ExperimentConfig& cfg, int n);

}  // namespace msol
