#pragma once

#include <stdexcept>
#include <string>

namespace levymap {

// parse/validation failure; field_path is dotted ("law.family")
struct ConfigError : std::runtime_error {
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), field_path(std::move(path)) {}
    std::string field_path;
};

// probe integral of the mapping diverged for the given exponent
struct DomainViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// operation not available for this law / measure variant
struct UnsupportedFamily : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfiniteMass : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// numeric test can neither certify convergence nor divergence
struct Undecidable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace levymap
