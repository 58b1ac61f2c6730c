// dtclab — experiments on the glide-symmetric driven qubit and its Ising chain.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dtc/num/errors.hpp"

namespace {

using dtc::cli::json;

std::string flag_name(std::string key) {
    for (auto& c : key) {
        if (c == '_') c = '-';
    }
    return "--" + key;
}

// A flag value typed after the default it replaces.
json flag_value(const std::string& key, const json& def, const std::string& text) {
    auto scalar = [&](const std::string& s) {
        try {
            return json::parse(s);
        } catch (const json::parse_error&) {
            throw dtc::ValidationError(flag_name(key) + ": cannot parse '" + s + "'");
        }
    };
    if (key == "psi0" && text == "random") return text;
    if (def.is_string()) return text;
    if (def.is_array()) {
        json list = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) list.push_back(scalar(item));
        return list;
    }
    return scalar(text);
}

const std::map<std::string, std::string> kBlurbs = {
    {"roots", "resonant alphas where the one-period stay probability vanishes"},
    {"rho-curve", "stay probability over an alpha sweep, with the Bessel estimate"},
    {"strobo", "stroboscopic portrait of one qubit and its periodicity verdict"},
    {"manybody", "driven Ising chain: magnetization, spectrum, envelope, lifetime"},
    {"scaling", "lifetime against chain length, with the exponential fit"},
    {"winding", "winding number of the chiral Hamiltonian over one period"},
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
};

int run(int argc, char** argv) {
    CLI::App app{"dtclab: glide-symmetric discrete time crystal laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dtc::cli::kToolVersion));

    std::string out;
    std::string format = "csv";
    std::string config_file;
    int workers = dtc::cli::default_workers();

    std::map<std::string, Subcommand> subs;
    for (const auto& name : dtc::cli::command_names()) {
        auto& sub = subs[name];
        sub.app = app.add_subcommand(name, kBlurbs.at(name));
        sub.app->add_option("--out", out, "output file stem or directory");
        sub.app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub.app->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        sub.app->add_option("--config", config_file, "JSON run description or earlier output");
        const json defaults = dtc::cli::default_config(name);
        for (const auto& [key, def] : defaults.items()) {
            if (def.is_boolean()) {
                sub.app->add_flag(flag_name(key), sub.flags[key]);
            } else {
                sub.app->add_option(flag_name(key), sub.values[key]);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto& [name, sub] : subs) {
        if (!sub.app->parsed()) continue;
        const json defaults = dtc::cli::default_config(name);
        json flags = json::object();
        for (const auto& [key, text] : sub.values) {
            if (sub.app->count(flag_name(key)) > 0) flags[key] = flag_value(key, defaults.at(key), text);
        }
        for (const auto& [key, on] : sub.flags) {
            if (sub.app->count(flag_name(key)) > 0) flags[key] = on;
        }
        json config = dtc::cli::merge_config(defaults, flags);
        if (!config_file.empty()) {
            const auto loaded = dtc::cli::load_config_file(config_file);
            if (!loaded.command.empty() && loaded.command != name) {
                throw dtc::ValidationError("config file describes '" + loaded.command +
                                           "', not '" + name + "'");
            }
            config = dtc::cli::merge_config(config, loaded.config);
        }

        const auto start = std::chrono::steady_clock::now();
        const auto artifacts = dtc::cli::run_command(name, config, workers);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const auto fmt = dtc::cli::parse_format(format);
        const dtc::cli::RunHeader header{name, config, wall};
        const auto stem = dtc::cli::output_stem(out, name);
        if (!stem.parent_path().empty()) std::filesystem::create_directories(stem.parent_path());
        for (const auto& artifact : artifacts) {
            const auto path = dtc::cli::artifact_path(stem, artifact, fmt);
            std::ofstream file(path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
            file << dtc::cli::render(artifact, header, fmt);
            std::cout << path.string() << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dtc::ValidationError& e) {
        std::cerr << "dtclab: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "dtclab: " << e.what() << '\n';
        return 2;
    } catch (const dtc::NumericalError& e) {
        std::cerr << "dtclab: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "dtclab: " << e.what() << '\n';
        return 3;
    }
}
