#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace triopf {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Network data failed validation. Carries one diagnostic per violated invariant.
struct ValidationError : Error {
    std::vector<std::string> issues;
    explicit ValidationError(std::vector<std::string> list)
        : Error(list.empty() ? "validation failed" : list.front() +
                (list.size() > 1 ? " (+" + std::to_string(list.size() - 1) + " more)" : "")),
          issues(std::move(list)) {}
};

/// Input file does not match the documented schema. `pointer` locates the offending element.
struct SchemaError : Error {
    std::string pointer;
    SchemaError(std::string ptr, const std::string& msg)
        : Error(ptr + ": " + msg), pointer(std::move(ptr)) {}
};

struct SingularImpedance : Error {
    using Error::Error;
};

struct DisconnectedNetwork : Error {
    using Error::Error;
};

struct SingularJacobian : Error {
    using Error::Error;
};

struct DegenerateSequence : Error {
    using Error::Error;
};

struct MissingLimit : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Power-flow replay failed to converge while verifying a dispatch. `period`
/// names the first failing period.
struct ReplayDivergence : Error {
    int period = -1;
    ReplayDivergence(int t, const std::string& msg) : Error(msg), period(t) {}
};

} // namespace triopf
