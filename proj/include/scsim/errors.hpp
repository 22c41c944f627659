#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented call contract (wrong basis, unseparated
/// branches, step size too coarse, ...).
struct ContractError : Error {
    using Error::Error;
};

/// A trajectory left the declared domain of its potential.
struct EscapeError : Error {
    EscapeError(const std::string& what, double exit_time)
        : Error(what), exit_time(exit_time) {}
    double exit_time;
};

/// A binning grid failed to cover the ensemble support.
struct CoverageError : Error {
    CoverageError(const std::string& what, double missing_mass)
        : Error(what), missing_mass(missing_mass) {}
    double missing_mass;
};

/// Phase decomposition hit nodes inside the bulk of the wavefunction.
struct DecompositionError : Error {
    DecompositionError(const std::string& what, std::vector<double> nodes)
        : Error(what), node_positions(std::move(nodes)) {}
    std::vector<double> node_positions;
};

/// A scenario file failed schema validation.
struct SchemaError : Error {
    using Error::Error;
};

}  // namespace scsim
