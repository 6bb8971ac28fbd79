#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hexrigid {

enum class ErrorKind {
    invalid_argument,
    invalid_triangle,
    invalid_edge,
    invalid_factor,
    not_acute,
    not_flat,
    not_linear,
    degenerate,
    incomplete_data,
    domain_too_small,
    not_found,
    solver_stuck,
    data_error,
};

inline std::string_view to_string(ErrorKind k)
{
    switch (k) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::invalid_triangle: return "invalid-triangle";
        case ErrorKind::invalid_edge: return "invalid-edge";
        case ErrorKind::invalid_factor: return "invalid-factor";
        case ErrorKind::not_acute: return "not-acute";
        case ErrorKind::not_flat: return "not-flat";
        case ErrorKind::not_linear: return "not-linear";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::incomplete_data: return "incomplete-data";
        case ErrorKind::domain_too_small: return "domain-too-small";
        case ErrorKind::not_found: return "not-found";
        case ErrorKind::solver_stuck: return "solver-stuck";
        case ErrorKind::data_error: return "data-error";
    }
    return "unknown";
}

/** @brief Library exception carrying a machine-readable kind */
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_{kind}
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace hexrigid
