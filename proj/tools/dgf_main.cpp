#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgf/config.hpp"
#include "dgf/errors.hpp"
#include "dgf/scenarios.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::string preset;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config_path, "flat key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (created if missing)");
    sub->add_option("--preset", o.preset, "named scenario preset");
    sub->add_option("--set", o.sets, "override one key=value (repeatable)");
    auto* s = sub->add_option("--seed", o.seed, "master seed for all noise streams");
    sub->parse_complete_callback([&o, s] { o.seed_given = s->count() > 0; });
}

dgf::config::RunConfig resolve(const std::string& mode, const Options& o,
                               bool check_mode) {
    dgf::config::RunConfig cfg;
    if (!o.preset.empty()) {
        const auto* p = dgf::scenarios::find_preset(o.preset);
        if (!p) {
            std::string names;
            for (const auto& q : dgf::scenarios::presets()) names += " " + q.name;
            throw dgf::ConfigError("unknown preset '" + o.preset + "'; available:" + names);
        }
        if (check_mode && p->mode != mode)
            throw dgf::ConfigError("preset '" + o.preset + "' belongs to mode '" +
                                   p->mode + "', not '" + mode + "'");
        p->apply(cfg);
        cfg.preset_name = o.preset;
    }
    if (!o.config_path.empty()) cfg = dgf::config::load_file(o.config_path, cfg);
    for (const auto& kv : o.sets) dgf::config::apply_line(cfg, kv);
    if (o.seed_given) cfg.plant.seed = o.seed;
    return cfg;
}

int run_one(const std::string& mode, const Options& o) {
    const auto cfg = resolve(mode, o, true);
    const auto art = dgf::scenarios::run_mode(mode, cfg);
    fs::create_directories(o.out_dir);
    for (const auto& [name, content] : art.files) {
        const fs::path p = fs::path(o.out_dir) / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw dgf::Error("cannot write " + p.string());
        f << content;
        if (!f) throw dgf::Error("short write to " + p.string());
    }
    std::cout << art.summary << "\n";
    for (const auto& [name, content] : art.files)
        std::cout << "  wrote " << (fs::path(o.out_dir) / name).string() << " ("
                  << content.size() << " bytes)\n";
    return art.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"laser-heated glass deposition: simulation and control toolkit"};
    app.require_subcommand(1);

    struct Mode {
        const char* name;
        const char* help;
    };
    const Mode modes[] = {
        {"track", "deposit one straight track"},
        {"wall", "deposit a multi-layer wall with direction reversals"},
        {"chimney", "deposit a square tube with the camera in the loop"},
        {"map", "sweep constant power and defocus, classify each cell"},
        {"sysid", "run excitation experiments and fit a first-order model"},
        {"design", "print the regulator design at the configured operating point"},
        {"beam", "trace the delivery optics and export beam profiles"},
    };
    Options opt;
    std::vector<CLI::App*> subs;
    for (const auto& m : modes) {
        auto* sub = app.add_subcommand(m.name, m.help);
        add_common(sub, opt);
        subs.push_back(sub);
    }
    auto* defaults = app.add_subcommand(
        "defaults", "print the fully resolved configuration and exit");
    add_common(defaults, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (defaults->parsed()) {
            std::cout << dgf::config::serialize(resolve("", opt, false));
            return 0;
        }
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return run_one(modes[i].name, opt);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
