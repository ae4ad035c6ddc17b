#include "dgf/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "dgf/errors.hpp"

namespace dgf::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse number from '" + v + "'");
    return x;
}

long long parse_int(const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    const long long x = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse integer from '" + v + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': cannot parse boolean from '" + v + "'");
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

struct Entry {
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Ref>
Entry dbl(const char* key, Ref ref) {
    return {key,
            [key, ref](RunConfig& c, const std::string& v) { ref(c) = parse_double(key, v); },
            [ref](const RunConfig& c) { return fmt_double(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Entry intk(const char* key, Ref ref) {
    return {key,
            [key, ref](RunConfig& c, const std::string& v) {
                ref(c) = static_cast<int>(parse_int(key, v));
            },
            [ref](const RunConfig& c) {
                return std::to_string(ref(const_cast<RunConfig&>(c)));
            }};
}

template <class Ref>
Entry u64k(const char* key, Ref ref) {
    return {key,
            [key, ref](RunConfig& c, const std::string& v) {
                const char* s = v.c_str();
                char* end = nullptr;
                const unsigned long long x = std::strtoull(s, &end, 10);
                if (end == s || *end != '\0')
                    throw ConfigError(std::string("key '") + key +
                                      "': cannot parse integer from '" + v + "'");
                ref(c) = x;
            },
            [ref](const RunConfig& c) {
                return std::to_string(ref(const_cast<RunConfig&>(c)));
            }};
}

template <class Ref>
Entry boolk(const char* key, Ref ref) {
    return {key,
            [key, ref](RunConfig& c, const std::string& v) { ref(c) = parse_bool(key, v); },
            [ref](const RunConfig& c) {
                return ref(const_cast<RunConfig&>(c)) ? "1" : "0";
            }};
}

template <class Ref>
Entry strk(const char* key, Ref ref) {
    return {key, [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
            [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

#define DGF_REF(member) [](RunConfig& c) -> auto& { return c.member; }

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        // motion / geometry
        dbl("scan_speed_mm_s", DGF_REF(plant.scan_speed_mm_s)),
        dbl("feed_rate_mm_s", DGF_REF(plant.feed_rate_mm_s)),
        dbl("filament_diameter_mm", DGF_REF(plant.filament_diameter_mm)),
        dbl("distance_from_focus_mm", DGF_REF(plant.distance_from_focus_mm)),
        dbl("interlayer_distance_mm", DGF_REF(plant.interlayer_distance_mm)),
        dbl("heatbed_temp_C", DGF_REF(plant.heatbed_temp_C)),
        dbl("dt_s", DGF_REF(plant.dt_s)),
        u64k("seed", DGF_REF(plant.seed)),
        // plant anchors
        dbl("nominal_gain_C_per_W", DGF_REF(plant.nominal_gain_C_per_W)),
        dbl("nominal_tau_s", DGF_REF(plant.nominal_tau_s)),
        dbl("nominal_df_mm", DGF_REF(plant.nominal_df_mm)),
        dbl("nominal_power_W", DGF_REF(plant.nominal_power_W)),
        dbl("nominal_temp_C", DGF_REF(plant.nominal_temp_C)),
        dbl("power_loss_W", DGF_REF(plant.power_loss_W)),
        dbl("baseline_override_C", DGF_REF(plant.baseline_override_C)),
        dbl("initial_temp_C", DGF_REF(plant.initial_temp_C)),
        // beam
        dbl("wavelength_nm", DGF_REF(plant.wavelength_nm)),
        dbl("beam_waist_um", DGF_REF(plant.beam_waist_um)),
        dbl("beam_rayleigh_um", DGF_REF(plant.beam_rayleigh_um)),
        // heat accumulation
        dbl("layer_temp_rise_C", DGF_REF(plant.layer_temp_rise_C)),
        intk("layer_ramp_layers", DGF_REF(plant.layer_ramp_layers)),
        dbl("tau_layer_factor", DGF_REF(plant.tau_layer_factor)),
        dbl("corner_amp_C", DGF_REF(plant.corner_amp_C)),
        dbl("corner_growth_exp", DGF_REF(plant.corner_growth_exp)),
        intk("corner_ref_index", DGF_REF(plant.corner_ref_index)),
        dbl("corner_radius_mm", DGF_REF(plant.corner_radius_mm)),
        // thresholds
        dbl("wet_min_C", DGF_REF(plant.wet_min_C)),
        dbl("detach_max_C", DGF_REF(plant.detach_max_C)),
        dbl("vaporize_max_C", DGF_REF(plant.vaporize_max_C)),
        dbl("detach_dwell_s", DGF_REF(plant.detach_dwell_s)),
        dbl("cold_curl_band_C", DGF_REF(plant.cold_curl_band_C)),
        // actuator
        dbl("laser_min_W", DGF_REF(plant.laser_min_W)),
        dbl("laser_max_W", DGF_REF(plant.laser_max_W)),
        // stochastic terms
        dbl("diameter_sigma_mm", DGF_REF(plant.diameter_sigma_mm)),
        dbl("deflection_sigma_mm", DGF_REF(plant.deflection_sigma_mm)),
        dbl("deflection_tau_s", DGF_REF(plant.deflection_tau_s)),
        dbl("deflection_corner_peak_mm", DGF_REF(plant.deflection_corner_peak_mm)),
        dbl("deflection_gain_coupling", DGF_REF(plant.deflection_gain_coupling)),
        dbl("measurement_noise_C", DGF_REF(plant.measurement_noise_C)),
        // sensing
        dbl("frame_noise_C", DGF_REF(plant.frame_noise_C)),
        intk("hot_pixels_n", DGF_REF(plant.hot_pixels_n)),
        dbl("roi_diameter_mm", DGF_REF(plant.roi_diameter_mm)),
        dbl("nuc_period_s", DGF_REF(plant.nuc_period_s)),
        dbl("nuc_dwell_s", DGF_REF(plant.nuc_dwell_s)),
        // control targets
        dbl("desired_tau_fast_s", DGF_REF(plant.desired_tau_fast_s)),
        dbl("desired_tau_slow_s", DGF_REF(plant.desired_tau_slow_s)),
        // power source
        boolk("closed_loop", DGF_REF(closed_loop)),
        dbl("power_W", DGF_REF(power_W)),
        dbl("ref_C", DGF_REF(ref_C)),
        // track geometry
        dbl("track_length_mm", DGF_REF(track_length_mm)),
        dbl("track_lead_in_mm", DGF_REF(track_lead_in_mm)),
        // wall geometry
        dbl("wall_length_mm", DGF_REF(wall_length_mm)),
        intk("wall_layers", DGF_REF(wall_layers)),
        dbl("wall_lead_in_mm", DGF_REF(wall_lead_in_mm)),
        // chimney geometry
        dbl("rect_side_mm", DGF_REF(rect_side_mm)),
        intk("rect_layers", DGF_REF(rect_layers)),
        dbl("rect_layer_drop_mm", DGF_REF(rect_layer_drop_mm)),
        dbl("preheat_timeout_s", DGF_REF(preheat_timeout_s)),
        dbl("retraction_feed_mm_s", DGF_REF(retraction_feed_mm_s)),
        // map sweep
        dbl("map_power_min_W", DGF_REF(map_power_min_W)),
        dbl("map_power_max_W", DGF_REF(map_power_max_W)),
        dbl("map_power_step_W", DGF_REF(map_power_step_W)),
        dbl("map_df_min_mm", DGF_REF(map_df_min_mm)),
        dbl("map_df_max_mm", DGF_REF(map_df_max_mm)),
        dbl("map_df_step_mm", DGF_REF(map_df_step_mm)),
        dbl("map_cell_duration_s", DGF_REF(map_cell_duration_s)),
        // identification
        strk("sysid_excitation", DGF_REF(sysid_excitation)),
        dbl("sysid_low_W", DGF_REF(sysid_low_W)),
        dbl("sysid_high_W", DGF_REF(sysid_high_W)),
        dbl("sysid_min_dwell_s", DGF_REF(sysid_min_dwell_s)),
        dbl("sysid_chirp_f0_Hz", DGF_REF(sysid_chirp_f0_Hz)),
        dbl("sysid_chirp_f1_Hz", DGF_REF(sysid_chirp_f1_Hz)),
        dbl("sysid_sine_period_s", DGF_REF(sysid_sine_period_s)),
        dbl("sysid_trim_mm", DGF_REF(sysid_trim_mm)),
    };
    return entries;
}

#undef DGF_REF

const Entry* find_entry(const std::string& key) {
    for (const auto& e : registry())
        if (key == e.key) return &e;
    return nullptr;
}

}  // namespace

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    keys.reserve(registry().size());
    for (const auto& e : registry()) keys.emplace_back(e.key);
    return keys;
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    const Entry* e = find_entry(key);
    if (!e) throw ConfigError("unknown config key '" + key + "'");
    e->set(cfg, trim(value));
}

void apply_line(RunConfig& cfg, const std::string& raw, int line_no) {
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    try {
        apply_kv(cfg, key, value);
    } catch (const ConfigError& err) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + err.what());
    }
}

RunConfig apply_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) apply_line(base, line, ++line_no);
    return base;
}

RunConfig load_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return apply_text(buf.str(), std::move(base));
}

std::string serialize(const RunConfig& cfg) {
    std::string out;
    for (const auto& e : registry()) {
        out += e.key;
        out += " = ";
        out += e.get(cfg);
        out += '\n';
    }
    return out;
}

}  // namespace dgf::config
