#pragma once

#include <string>
#include <vector>

#include "dgf/plant.hpp"

namespace dgf::config {

/// Full resolved configuration for one run: the plant scenario plus the
/// harness-level knobs (mode geometry, power source, sweep ranges,
/// excitation shapes). Loads from flat `key = value` text.
struct RunConfig {
    plant::ScenarioConfig plant;

    // power source
    bool closed_loop = false;
    double power_W = 42.6;  ///< open-loop constant command
    double ref_C = 888.0;   ///< closed-loop reference

    // track geometry
    double track_length_mm = 60.0;
    double track_lead_in_mm = 0.0;

    // wall geometry
    double wall_length_mm = 20.0;
    int wall_layers = 16;
    double wall_lead_in_mm = 5.0;

    // chimney geometry
    double rect_side_mm = 20.0;
    int rect_layers = 4;
    double rect_layer_drop_mm = 0.8;
    double preheat_timeout_s = 60.0;
    double retraction_feed_mm_s = -2.0;

    // parameter map sweep
    double map_power_min_W = 20.0;
    double map_power_max_W = 60.0;
    double map_power_step_W = 10.0;
    double map_df_min_mm = 3.0;
    double map_df_max_mm = 10.0;
    double map_df_step_mm = 1.0;
    double map_cell_duration_s = 30.0;

    // identification experiments
    std::string sysid_excitation = "prbs";  ///< prbs | chirp | sine
    double sysid_low_W = 30.0;
    double sysid_high_W = 60.0;
    double sysid_min_dwell_s = 0.1;
    double sysid_chirp_f0_Hz = 0.0;
    double sysid_chirp_f1_Hz = 0.2;
    double sysid_sine_period_s = 31.4;
    double sysid_trim_mm = 10.0;

    // not a config key; set by the CLI for the manifest
    std::string preset_name = "none";
};

/// All recognized keys, in serialization order.
std::vector<std::string> known_keys();

/// Set one key from its text value. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parse one `key = value` line (blank and `#` comment lines are ignored;
/// trailing comments allowed). line_no is used in error messages.
void apply_line(RunConfig& cfg, const std::string& line, int line_no = 0);

/// Apply a whole config file over `base`.
RunConfig load_file(const std::string& path, RunConfig base = {});

/// Apply config text over `base`.
RunConfig apply_text(const std::string& text, RunConfig base = {});

/// Full `key = value` dump of every key, serialization order, one per line.
std::string serialize(const RunConfig& cfg);

}  // namespace dgf::config
