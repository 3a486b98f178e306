// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "edcal/dataio.hpp"
#include "edcal/edmodel.hpp"
#include "edcal/errors.hpp"
#include "edcal/metrics.hpp"
#include "edcal/optimizer.hpp"
#include "edcal/params.hpp"
#include "edcal/replication.hpp"

namespace edcal {
namespace {

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}

ScenarioConfig scenario_for(const std::filesystem::path& p) {
    return p.empty() ? default_scenario() : load_scenario(p);
}

ParamVector params_for(const std::filesystem::path& p) {
    return p.empty() ? reference_params() : load_params(p);
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
}

// Two-sided 95% Student-t confidence half-width for a mean of n values.
double ci95_halfwidth(double sd, int n) {
    if (n < 2) throw DomainError("ci95_halfwidth: need n >= 2");
    boost::math::students_t_distribution<double> t(n - 1);
    return boost::math::quantile(t, 0.975) * sd / std::sqrt(static_cast<double>(n));
}

std::string rep_file_name(const char* stem, int rep, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03d.%s", stem, rep, ext);
    return buf;
}

void write_kpi_files(const std::filesystem::path& dir,
                     std::span<const ReplicationOutput> runs) {
    char buf[96];
    for (std::size_t r = 0; r < runs.size(); ++r) {
        auto out = open_out(dir / rep_file_name("kpis_rep", static_cast<int>(r), "csv"));
        out << "tag,unit,metric,value\n";
        for (auto [t, u] : feasible_pairs()) {
            for (Metric m : {Metric::DOT, Metric::DIT}) {
                for (double v : runs[r].kpis.cell(t, u, m)) {
                    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.6f\n", to_string(t),
                                  to_string(u), to_string(m), v);
                    out << buf;
                }
            }
        }
    }
}

void write_patient_counts(const std::filesystem::path& dir,
                          std::span<const ReplicationOutput> runs) {
    auto out = open_out(dir / "patient_counts.csv");
    out << "tag,unit,mean,ci95_halfwidth\n";
    const int n = static_cast<int>(runs.size());
    char buf[96];
    for (auto [t, u] : decision_pairs()) {
        std::vector<double> counts;
        counts.reserve(runs.size());
        for (const auto& run : runs)
            counts.push_back(run.patient_counts[static_cast<int>(t)][static_cast<int>(u)]);
        KpiStats st = sample_stats(counts);
        if (n >= 2) {
            std::snprintf(buf, sizeof buf, "%s,%s,%.4f,%.4f\n", to_string(t),
                          to_string(u), st.mean, ci95_halfwidth(st.std, n));
        } else {
            std::snprintf(buf, sizeof buf, "%s,%s,%.4f,\n", to_string(t),
                          to_string(u), st.mean);
        }
        out << buf;
    }
    if (n < 2)
        std::fprintf(stderr, "warning: single replication, confidence intervals left empty\n");
}

void write_census_by_rep(const std::filesystem::path& dir,
                         std::span<const ReplicationOutput> runs,
                         const ScenarioConfig& cfg) {
    auto out = open_out(dir / "census_by_rep.csv");
    out << "tag,unit,rep,hour,value\n";
    char buf[96];
    for (auto [t, u] : feasible_pairs()) {
        for (std::size_t r = 0; r < runs.size(); ++r) {
            auto avg = hourly_census(
                runs[r].census_log[static_cast<int>(t)][static_cast<int>(u)],
                cfg.warmup_hours, cfg.horizon_hours);
            for (int h = 0; h < 24; ++h) {
                std::snprintf(buf, sizeof buf, "%s,%s,%zu,%d,%.6f\n", to_string(t),
                              to_string(u), r, h, avg[h]);
                out << buf;
            }
        }
    }
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
    return guarded([&] {
        if (args.reps < 1) throw ConfigError("simulate: --reps must be >= 1");
        if (args.jobs < 1) throw ConfigError("simulate: --jobs must be >= 1");
        if (args.out_dir.empty()) throw ConfigError("simulate: --out is required");
        ScenarioConfig cfg = scenario_for(args.config);
        ParamVector params = params_for(args.params);
        std::filesystem::create_directories(args.out_dir);

        std::vector<ReplicationOutput> runs;
        if (args.trace) {
            for (int r = 0; r < args.reps; ++r) {
                TraceLog log;
                runs.push_back(run_replication(cfg, params, r, args.seed, &log));
                auto out = open_out(args.out_dir / rep_file_name("trace_rep", r, "tsv"));
                log.dump_tsv(out);
            }
        } else {
            runs = run_replications(cfg, params, args.reps, args.seed, args.jobs);
        }

        write_kpi_files(args.out_dir, runs);
        write_patient_counts(args.out_dir, runs);
        write_census_by_rep(args.out_dir, runs, cfg);
        std::printf("simulate: %d replication(s) written to %s\n", args.reps,
                    args.out_dir.string().c_str());
        return kExitOk;
    });
}

int cmd_gen_synthetic(const GenSyntheticArgs& args) {
    return guarded([&] {
        if (args.reps < 1) throw ConfigError("gen-synthetic: --reps must be >= 1");
        if (args.out_dir.empty()) throw ConfigError("gen-synthetic: --out is required");
        ScenarioConfig cfg = scenario_for(args.config);
        ParamVector truth = params_for(args.params);
        std::filesystem::create_directories(args.out_dir);

        SyntheticData data = gen_synthetic(truth, cfg, args.seed, args.reps);
        write_dataset(data.dataset, args.out_dir / "dataset.csv");
        write_annotations(data.annotations, args.out_dir / "annotations.csv");
        std::printf("gen-synthetic: %zu records, %zu exam requests written to %s\n",
                    data.dataset.records.size(), data.annotations.size(),
                    args.out_dir.string().c_str());
        return kExitOk;
    });
}

int cmd_calibrate(const CalibrateArgs& args) {
    return guarded([&] {
        if (args.reps < 1) throw ConfigError("calibrate: --reps must be >= 1");
        if (args.budget < 1) throw ConfigError("calibrate: --budget must be >= 1");
        if (args.jobs < 1) throw ConfigError("calibrate: --jobs must be >= 1");
        if (args.dataset.empty()) throw ConfigError("calibrate: --dataset is required");
        if (args.out_dir.empty()) throw ConfigError("calibrate: --out is required");
        if (args.auto_start && !args.params.empty())
            throw ConfigError("calibrate: --auto-start and --params are mutually exclusive");

        ScenarioConfig cfg = scenario_for(args.config);
        Dataset ds = load_dataset(args.dataset);
        std::vector<KpiSampleSet> real_sets;
        real_sets.push_back(extract_kpis(ds.records));

        ParamVector start;
        if (args.auto_start) {
            std::vector<ExamRequest> reqs;
            if (!args.annotations.empty()) reqs = load_annotations(args.annotations);
            GuessResult guess = initial_guess(ds, reqs, cfg);
            for (const auto& wmsg : guess.warnings)
                std::fprintf(stderr, "warning: initial guess: %s\n", wmsg.c_str());
            start = guess.params;
        } else if (!args.params.empty()) {
            start = load_params(args.params);
        } else {
            for (auto& t : start.triage) t = cfg.initial_triage;
            for (auto& v : start.visit) v = cfg.initial_visit;
            for (auto& e : start.exams) e = cfg.initial_exams;
        }

        std::filesystem::create_directories(args.out_dir);
        save_params(start, args.out_dir / "start_params.json");

        struct EvalRow {
            int index;
            double f, max_g, max_h, wall;
        };
        std::vector<EvalRow> eval_rows;
        int eval_index = 0;

        Evaluator evaluate = [&](std::span<const double> v) {
            EvalResult res = evaluate_point(unflatten(v), cfg, real_sets, args.reps,
                                            args.seed, args.jobs);
            double max_g = 0.0, max_h = 0.0;
            for (double gv : res.g) max_g = std::max(max_g, gv);
            for (double hv : res.h) max_h = std::max(max_h, hv);
            eval_rows.push_back({eval_index++, res.f, max_g, max_h, res.wall_seconds});
            if (!res.ok)
                std::fprintf(stderr, "warning: point rejected: %s\n", res.failure.c_str());
            Evaluation ev;
            ev.ok = res.ok;
            ev.f = res.f;
            ev.cons.reserve(res.g.size() + res.h.size());
            ev.cons.insert(ev.cons.end(), res.g.begin(), res.g.end());
            ev.cons.insert(ev.cons.end(), res.h.begin(), res.h.end());
            return ev;
        };

        SolveOptions opts;
        opts.budget = args.budget;
        opts.seed = args.seed;
        ParamBounds pb = default_bounds();
        SolveReport report =
            solve(evaluate, flatten(start), pb.lower, pb.upper, lattice_deltas(), opts);

        ParamVector best = unflatten(report.best_point);
        save_params(best, args.out_dir / "best_params.json");
        {
            auto out = open_out(args.out_dir / "solve_history.csv");
            write_history_csv(report, out);
        }
        {
            auto out = open_out(args.out_dir / "evaluations.csv");
            out << "evaluation,f,max_g,max_h,wall_seconds\n";
            char buf[160];
            for (const auto& row : eval_rows) {
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.6f\n", row.index,
                              row.f, row.max_g, row.max_h, row.wall);
                out << buf;
            }
        }
        {
            auto out = open_out(args.out_dir / "summary.json");
            write_summary_json(report, out);
        }
        {
            // Constraint residuals at the returned point (same seed, so this
            // reproduces the evaluation the search saw).
            EvalResult res =
                evaluate_point(best, cfg, real_sets, args.reps, args.seed, args.jobs);
            auto out = open_out(args.out_dir / "residuals.csv");
            out << "tag,unit,metric,g,h\n";
            char buf[160];
            for (std::size_t i = 0; i < res.cells.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%s,%s,%s,%.9g,%.9g\n",
                              to_string(res.cells[i].tag),
                              to_string(res.cells[i].unit),
                              to_string(res.cells[i].metric), res.g[i], res.h[i]);
                out << buf;
            }
        }

        std::printf("calibrate: f = %.9g, max violation = %.3g, %d evaluation(s), %s\n",
                    report.best_f, report.best_max_violation, report.evaluations_used,
                    report.feasible ? "feasible" : "no feasible point found");
        return report.feasible ? kExitOk : kExitInfeasible;
    });
}

namespace {

// Per-replication KPI sets parsed back from simulate's kpis_rep files.
std::vector<KpiSampleSet> load_sim_kpis(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("kpis_rep_", 0) == 0 && name.size() >= 4 &&
            name.substr(name.size() - 4) == ".csv")
            files.push_back(e.path());
    }
    if (files.empty()) throw DataError("no kpis_rep_*.csv files in " + dir.string());
    std::sort(files.begin(), files.end());

    std::vector<KpiSampleSet> sets;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw DataError("cannot open " + file.string());
        std::string line;
        if (!std::getline(in, line) || (line != "tag,unit,metric,value" &&
                                        line != "tag,unit,metric,value\r"))
            throw DataError(file.string() + ": unexpected header");
        KpiSampleSet set;
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            std::istringstream row(line);
            std::string tag, unit, metric, value;
            if (!std::getline(row, tag, ',') || !std::getline(row, unit, ',') ||
                !std::getline(row, metric, ',') || !std::getline(row, value))
                throw DataError(file.string() + ":" + std::to_string(lineno) + ": bad row");
            if (!value.empty() && value.back() == '\r') value.pop_back();
            double v = 0.0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || p != value.data() + value.size())
                throw DataError(file.string() + ":" + std::to_string(lineno) + ": bad value");
            set.cell(tag_from_string(tag), unit_from_string(unit), metric_from_string(metric))
                .push_back(v);
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

// census_by_rep.csv -> per cell, per rep, 24 hourly values.
using CensusTable = std::map<std::pair<int, int>, std::vector<std::array<double, 24>>>;

CensusTable load_sim_census(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) ||
        (line != "tag,unit,rep,hour,value" && line != "tag,unit,rep,hour,value\r"))
        throw DataError(file.string() + ": unexpected header");
    CensusTable table;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string tag, unit, rep, hour, value;
        if (!std::getline(row, tag, ',') || !std::getline(row, unit, ',') ||
            !std::getline(row, rep, ',') || !std::getline(row, hour, ',') ||
            !std::getline(row, value))
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": bad row");
        if (!value.empty() && value.back() == '\r') value.pop_back();
        int t = static_cast<int>(tag_from_string(tag));
        int u = static_cast<int>(unit_from_string(unit));
        int r = std::stoi(rep);
        int h = std::stoi(hour);
        if (r < 0 || h < 0 || h > 23)
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": bad rep/hour");
        auto& reps = table[{t, u}];
        if (static_cast<std::size_t>(r) >= reps.size()) reps.resize(r + 1);
        reps[r][h] = std::stod(value);
    }
    return table;
}

}  // namespace

int cmd_report(const ReportArgs& args) {
    return guarded([&] {
        if (args.sim_dir.empty()) throw ConfigError("report: --sim is required");
        if (args.dataset.empty()) throw ConfigError("report: --dataset is required");
        if (args.out_dir.empty()) throw ConfigError("report: --out is required");

        std::vector<KpiSampleSet> sim = load_sim_kpis(args.sim_dir);
        CensusTable census = load_sim_census(args.sim_dir / "census_by_rep.csv");
        Dataset ds = load_dataset(args.dataset);
        KpiSampleSet real = extract_kpis(ds.records);
        std::filesystem::create_directories(args.out_dir);

        const int n_reps = static_cast<int>(sim.size());
        if (n_reps < 2)
            std::fprintf(stderr,
                         "warning: single replication, confidence intervals left empty\n");
        char buf[192];

        // KPI distribution tables, one file per decision cell and metric.
        for (auto [t, u] : decision_pairs()) {
            for (Metric m : {Metric::DOT, Metric::DIT}) {
                const auto& rs = real.cell(t, u, m);
                if (rs.empty()) {
                    std::fprintf(stderr, "warning: dataset has no %s/%s %s samples, skipped\n",
                                 to_string(t), to_string(u),
                                 to_string(m));
                    continue;
                }
                std::vector<StepFunction> rep_cdfs;
                for (const auto& set : sim)
                    if (!set.cell(t, u, m).empty()) rep_cdfs.push_back(ecdf(set.cell(t, u, m)));
                if (rep_cdfs.empty()) {
                    std::fprintf(stderr,
                                 "warning: simulation has no %s/%s %s samples, skipped\n",
                                 to_string(t), to_string(u),
                                 to_string(m));
                    continue;
                }
                StepFunction fr = ecdf(rs);
                StepFunction fs = mean_ecdf(rep_cdfs);
                std::vector<double> grid;
                grid.reserve(fr.x.size() + fs.x.size());
                grid.insert(grid.end(), fr.x.begin(), fr.x.end());
                grid.insert(grid.end(), fs.x.begin(), fs.x.end());
                std::sort(grid.begin(), grid.end());
                grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

                std::string name = std::string("ecdf_") + to_string(t) + "_" + to_string(u) +
                                   "_" + to_string(m) + ".csv";
                auto out = open_out(args.out_dir / name);
                out << "t,real,sim\n";
                for (double x : grid) {
                    std::snprintf(buf, sizeof buf, "%.6f,%.9f,%.9f\n", x, fr.value_at(x),
                                  fs.value_at(x));
                    out << buf;
                }
            }
        }

        // Moment comparison across all cells.
        {
            auto out = open_out(args.out_dir / "means.csv");
            out << "tag,unit,metric,real_mean,real_std,sim_mean,sim_std,sim_ci95_halfwidth\n";
            for (auto [t, u] : feasible_pairs()) {
                for (Metric m : {Metric::DOT, Metric::DIT}) {
                    const auto& rs = real.cell(t, u, m);
                    std::vector<double> rep_means;
                    for (const auto& set : sim)
                        if (!set.cell(t, u, m).empty())
                            rep_means.push_back(sample_stats(set.cell(t, u, m)).mean);
                    if (rs.empty() && rep_means.empty()) continue;

                    std::string row = std::string(to_string(t)) + "," + to_string(u) + "," +
                                      to_string(m) + ",";
                    if (!rs.empty()) {
                        KpiStats st = sample_stats(rs);
                        std::snprintf(buf, sizeof buf, "%.6f,%.6f", st.mean, st.std);
                        row += buf;
                        row += ",";
                    } else {
                        row += ",,";
                    }
                    if (!rep_means.empty()) {
                        KpiStats st = sample_stats(rep_means);
                        std::snprintf(buf, sizeof buf, "%.6f,%.6f,", st.mean, st.std);
                        row += buf;
                        if (rep_means.size() >= 2) {
                            std::snprintf(buf, sizeof buf, "%.6f",
                                          ci95_halfwidth(st.std,
                                                         static_cast<int>(rep_means.size())));
                            row += buf;
                        }
                    } else {
                        row += ",,";
                    }
                    out << row << "\n";
                }
            }
        }

        // Hourly census profiles per cell: dataset average vs simulation.
        for (auto [t, u] : feasible_pairs()) {
            std::vector<std::pair<double, int>> events;
            for (const auto& rec : ds.records) {
                if (!rec.tag || !rec.unit || *rec.tag != t || *rec.unit != u) continue;
                if (!rec.t2) continue;
                events.push_back({*rec.t2, +1});
                const std::optional<double>& exit_t = rec.t5 ? rec.t5 : rec.t6;
                if (exit_t) events.push_back({*exit_t, -1});
            }
            auto it = census.find({static_cast<int>(t), static_cast<int>(u)});
            if (events.empty() && it == census.end()) continue;

            std::array<double, 24> real_avg{};
            if (!events.empty()) {
                std::sort(events.begin(), events.end());
                real_avg = hourly_census(events, 0.0, ds.period_days * 24.0);
            }

            std::string name = std::string("census_") + to_string(t) + "_" + to_string(u) +
                               ".csv";
            auto out = open_out(args.out_dir / name);
            out << "hour,real,sim_mean,sim_ci95_halfwidth\n";
            for (int h = 0; h < 24; ++h) {
                std::string row = std::to_string(h) + ",";
                std::snprintf(buf, sizeof buf, "%.6f,", real_avg[h]);
                row += buf;
                if (it != census.end() && !it->second.empty()) {
                    std::vector<double> vals;
                    for (const auto& rep : it->second) vals.push_back(rep[h]);
                    KpiStats st = sample_stats(vals);
                    std::snprintf(buf, sizeof buf, "%.6f,", st.mean);
                    row += buf;
                    if (vals.size() >= 2) {
                        std::snprintf(buf, sizeof buf, "%.6f",
                                      ci95_halfwidth(st.std, static_cast<int>(vals.size())));
                        row += buf;
                    }
                } else {
                    row += ",";
                }
                out << row << "\n";
            }
        }

        std::printf("report: written to %s\n", args.out_dir.string().c_str());
        return kExitOk;
    });
}

}  // namespace edcal
