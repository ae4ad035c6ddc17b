#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgf/config.hpp"
#include "dgf/control.hpp"
#include "dgf/plant.hpp"
#include "dgf/sysid.hpp"

namespace dgf::scenarios {

inline constexpr const char* kArtifactVersion = "dgfsim 0.1.0";

struct Preset {
    std::string name;
    std::string mode;  ///< track | wall | chimney | map | sysid
    std::string description;
    std::function<void(config::RunConfig&)> apply;
};

/// Immutable preset registry.
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

/// Everything a run produced. Files are (name, content) in stable write
/// order; the CLI writes them under --out, tests read them in memory.
struct RunArtifacts {
    plant::Trajectory trajectory;
    std::optional<plant::DepositionOutcome> outcome;
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;
    int exit_code = 0;
};

/// Effective plant parameters at the run's operating point: given layer,
/// nominal diameter, far from any corner.
plant::EffectiveParams operating_point(const plant::PlantModel& model, int layer = 1);

/// Regulator design at the operating point: pulse model from the effective
/// (gain, tau), targets from the config's desired time constants, nominal
/// power chosen so the nominal temperature equals ref on the local model.
control::ControllerDesign design_for(const config::RunConfig& cfg,
                                     const plant::PlantModel& model, double ref_C);

RunArtifacts run_track(const config::RunConfig& cfg);
RunArtifacts run_wall(const config::RunConfig& cfg);
RunArtifacts run_chimney(const config::RunConfig& cfg);
RunArtifacts run_map(const config::RunConfig& cfg);
RunArtifacts run_sysid(const config::RunConfig& cfg);
RunArtifacts run_design(const config::RunConfig& cfg);
RunArtifacts run_beam(const config::RunConfig& cfg);

/// Dispatch by mode name (track|wall|chimney|map|sysid|design|beam).
RunArtifacts run_mode(const std::string& mode, const config::RunConfig& cfg);

/// Full resolved-run record: artifact version, mode, preset, config dump.
std::string manifest(const config::RunConfig& cfg, const std::string& mode);

/// Outcome enum <-> stable numeric code used in map exports.
int outcome_code(plant::OutcomeClass c);

}  // namespace dgf::scenarios
