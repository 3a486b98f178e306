// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace edcal {

// Invalid argument to a mathematical operation (bad distribution
// parameters, empty weight vectors, inverted intervals, ...).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or inconsistent scenario configuration / parameter files.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed dataset or annotation input.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Internal engine invariant broken (for example releasing a resource that
// the entity does not hold). Indicates a bug, never a user error; the
// current replication is abandoned.
struct EngineBug : std::logic_error {
    explicit EngineBug(const std::string& what) : std::logic_error(what) {}
};

}  // namespace edcal
