// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace edcal {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;   // config / data / usage problems
inline constexpr int kExitRuntime = 3;    // engine or system failures
inline constexpr int kExitInfeasible = 4; // calibration found no feasible point

struct SimulateArgs {
    std::filesystem::path config;  // empty: built-in default scenario
    std::filesystem::path params;  // empty: bundled reference parameters
    std::filesystem::path out_dir;
    int reps = 30;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool trace = false;
};
int cmd_simulate(const SimulateArgs& args);

struct GenSyntheticArgs {
    std::filesystem::path config;
    std::filesystem::path params;
    std::filesystem::path out_dir;
    int reps = 1;
    std::uint64_t seed = 0;
};
int cmd_gen_synthetic(const GenSyntheticArgs& args);

struct CalibrateArgs {
    std::filesystem::path config;
    std::filesystem::path dataset;
    std::filesystem::path params;       // explicit starting point
    std::filesystem::path annotations;  // exam requests, for --auto-start
    bool auto_start = false;            // derive the start from the data
    std::filesystem::path out_dir;
    int reps = 30;
    int budget = 3000;
    std::uint64_t seed = 0;
    int jobs = 1;
};
int cmd_calibrate(const CalibrateArgs& args);

struct ReportArgs {
    std::filesystem::path sim_dir;  // outputs of a previous `simulate`
    std::filesystem::path dataset;
    std::filesystem::path out_dir;
};
int cmd_report(const ReportArgs& args);

}  // namespace edcal
