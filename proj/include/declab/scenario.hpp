#pragma once

#include "declab/decay.hpp"
#include "declab/flux.hpp"
#include "declab/lattice.hpp"
#include "declab/microscope.hpp"
#include "declab/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace declab {

struct FourierMode {
    std::vector<long long> mode;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct MicroscopeConfig {
    std::string kind = "sine"; // sine | strong | noise | rescaled_solve | rescaled_wave
    std::vector<long long> omega = {1};
    double amplitude = 1.0;
    double offset = 0.0;
    std::vector<int> field_dims;   // static grid, or space-time eval grid (time first)
    std::vector<int> k_list;       // oscillation indices for rescaled sources
    std::vector<int> r_list = {8, 16, 32, 64};
    std::vector<int> m_list = {4, 8, 16};
    int p_levels = 17;
    std::vector<int> windows;
    std::vector<double> center;
    int arcs = 64;
    int pad = 4;
    bool localization = false;
    double angular_tol = 0.15;
    double dual_radius = 0.0; // 0 = default truncation radius
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    LatticeSpec lattice;
    FluxPL flux;

    double offset = 0.0;
    std::vector<FourierMode> modes;
    std::string csv_path; // raw cell values, C-order, one per line
    bool initial_from_csv = false;

    std::vector<int> dims;
    double t_end = 1.0;
    std::vector<double> samples;
    double cfl = 0.45;
    bool diagnostics = false;

    struct CriterionBlock {
        bool mean_set = false;
        Rational mean;
        double radius = 0.0; // 0 = default truncation radius
    };
    CriterionBlock nd2;
    CriterionBlock wave;

    std::vector<int> refinements = {100, 200, 400};
    ClassifyOptions classify;

    double squeeze_C = 1.5;
    int squeeze_samples = 8;

    MicroscopeConfig microscope;

    nlohmann::json raw; // post-override document (hashed into the manifest)

    PeriodicField initial_field(const std::vector<int>& grid_dims) const;
    Rational nd2_mean() const;  // configured mean or exact mean of the mode spec
    double nd2_radius() const;
};

/// Parse + validate a scenario file, applying "a.b.c=value" overrides first.
Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides);

Scenario scenario_from_json(nlohmann::json doc);

struct RunContext {
    std::filesystem::path out_dir;
    int threads = 1;
    bool seed_override = false;
    std::uint64_t seed = 0;
};

int run_solve(const Scenario& s, const RunContext& ctx);
int run_nd2(const Scenario& s, const RunContext& ctx);
int run_decay(const Scenario& s, const RunContext& ctx);
int run_wave(const Scenario& s, const RunContext& ctx);
int run_microscope(const Scenario& s, const RunContext& ctx);
int run_suite(const Scenario& s, const RunContext& ctx);

int run_scenario(const std::filesystem::path& path, const std::string& subcommand,
                 const std::vector<std::string>& overrides, const RunContext& ctx);

} // namespace declab
