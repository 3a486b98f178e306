// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: simulate an ED scenario, generate synthetic
// datasets, calibrate service-time parameters against a dataset, and
// build comparison reports.
#include <CLI11.hpp>

#include "edcal/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Emergency-department simulation and service-time calibration"};
    app.require_subcommand(1);

    edcal::SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Run replications and dump KPI tables");
    c_sim->add_option("--config", sim.config, "Scenario JSON (default: built-in scenario)");
    c_sim->add_option("--params", sim.params, "Service-time parameter JSON (default: bundled)");
    c_sim->add_option("--reps", sim.reps, "Number of replications")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Base RNG seed")->capture_default_str();
    c_sim->add_option("--jobs", sim.jobs, "Worker threads")->capture_default_str();
    c_sim->add_option("--out", sim.out_dir, "Output directory")->required();
    c_sim->add_flag("--trace", sim.trace, "Write per-replication event traces");

    edcal::GenSyntheticArgs gen;
    auto* c_gen = app.add_subcommand("gen-synthetic",
                                     "Simulate a ground truth and export it as a dataset");
    c_gen->add_option("--config", gen.config, "Scenario JSON (default: built-in scenario)");
    c_gen->add_option("--params", gen.params, "True parameter JSON (default: bundled)");
    c_gen->add_option("--reps", gen.reps, "Replications pooled into the dataset")
        ->capture_default_str();
    c_gen->add_option("--seed", gen.seed, "Base RNG seed")->capture_default_str();
    c_gen->add_option("--out", gen.out_dir, "Output directory")->required();

    edcal::CalibrateArgs cal;
    auto* c_cal = app.add_subcommand("calibrate",
                                     "Search service-time parameters matching a dataset");
    c_cal->add_option("--config", cal.config, "Scenario JSON (default: built-in scenario)");
    c_cal->add_option("--dataset", cal.dataset, "Reference dataset CSV")->required();
    c_cal->add_option("--params", cal.params, "Starting parameter JSON");
    c_cal->add_option("--annotations", cal.annotations,
                      "Exam-request CSV used by --auto-start");
    c_cal->add_flag("--auto-start", cal.auto_start,
                    "Derive the starting point from the dataset");
    c_cal->add_option("--reps", cal.reps, "Replications per evaluation")
        ->capture_default_str();
    c_cal->add_option("--budget", cal.budget, "Maximum objective evaluations")
        ->capture_default_str();
    c_cal->add_option("--seed", cal.seed, "Base RNG seed (common random numbers)")
        ->capture_default_str();
    c_cal->add_option("--jobs", cal.jobs, "Worker threads")->capture_default_str();
    c_cal->add_option("--out", cal.out_dir, "Output directory")->required();

    edcal::ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "Compare a simulation run to a dataset");
    c_rep->add_option("--sim", rep.sim_dir, "Directory written by `simulate`")->required();
    c_rep->add_option("--dataset", rep.dataset, "Reference dataset CSV")->required();
    c_rep->add_option("--out", rep.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : edcal::kExitBadInput;
    }

    if (c_sim->parsed()) return edcal::cmd_simulate(sim);
    if (c_gen->parsed()) return edcal::cmd_gen_synthetic(gen);
    if (c_cal->parsed()) return edcal::cmd_calibrate(cal);
    return edcal::cmd_report(rep);
}
