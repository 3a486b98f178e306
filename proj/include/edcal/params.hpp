// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "edcal/distributions.hpp"
#include "edcal/edtypes.hpp"

namespace edcal {

// Decision variables of the calibration problem: one Weibull (shape,
// scale) pair per activity and (tag, unit) cell. Triage has no dedicated
// (Green, MIU) process (those patients follow the MU or SU triage, chosen
// by a fair coin), so 7 + 8 + 8 pairs = 46 scalars.
struct ParamVector {
    std::array<WeibullParams, 7> triage{};
    std::array<WeibullParams, 8> visit{};
    std::array<WeibullParams, 8> exams{};

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

inline constexpr int kNumVars = 46;

// Cell orders behind the arrays above.
std::span<const std::pair<TriageTag, UnitId>> triage_pairs();  // 7
std::span<const std::pair<TriageTag, UnitId>> visit_pairs();   // 8, also the exams order

// Array index for a cell, -1 for the mixture cells that borrow other
// cells' distributions ((Green, MIU) triage; (Red, RA) everywhere).
// Inadmissible cells throw.
int triage_index(TriageTag t, UnitId u);
int visit_index(TriageTag t, UnitId u);

// Canonical flat layout: triage, visit, exams; (shape, scale) per cell.
std::vector<double> flatten(const ParamVector& p);
ParamVector unflatten(std::span<const double> v);

// Search lattice spacing per flat coordinate: 1e-3 for shapes, 1e-4 for
// scales (hours).
std::vector<double> lattice_deltas();

// Box bounds per flat coordinate. Every coordinate has lower bound 0.01;
// shapes are capped at 1000, scales at 0.5 (triage), 4 (visit) and 40
// (exams) hours.
struct ParamBounds {
    std::vector<double> lower, upper;
};
ParamBounds default_bounds();

// Reference calibrated parameter set bundled with the toolkit; used as the
// ground truth of the synthetic-data experiments.
ParamVector reference_params();

ParamVector load_params(const std::filesystem::path& file);
void save_params(const ParamVector& p, const std::filesystem::path& file);

}  // namespace edcal
