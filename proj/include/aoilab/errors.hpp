#pragma once

#include <stdexcept>
#include <string>

namespace aoilab {

// Invalid user-supplied parameter (exit code 2 at the CLI).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed scenario/config/checkpoint content. `field()` names the offending key.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// No feasible solution exists (e.g. SNR threshold unreachable at the flight altitude).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Tensor shape mismatch.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// API used outside its contract (non-scalar loss, decode on a finished state, ...).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aoilab
