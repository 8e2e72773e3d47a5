#pragma once

#include <stdexcept>
#include <string>

namespace probcal {

enum class errc {
    empty_input,
    non_finite_input,
    degenerate_range,
    missing_label,
    label_out_of_range,
    class_underpopulated,
    non_positive_variance,
    model_arity_mismatch,
    all_zero_mass,
    non_positive_temperature,
    no_positives,
    invalid_spec,
    invalid_config,
    parse_error,
    join_mismatch,
    io_error,
};

// Buckets the CLI maps to process exit codes.
enum class error_kind { config = 2, data = 3, numeric = 4 };

constexpr error_kind kind_of(errc c) {
    switch (c) {
    case errc::invalid_config:
        return error_kind::config;
    case errc::non_positive_variance:
    case errc::non_positive_temperature:
    case errc::all_zero_mass:
        return error_kind::numeric;
    default:
        return error_kind::data;
    }
}

class error : public std::runtime_error {
public:
    error(errc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}

    errc code() const noexcept { return code_; }
    error_kind kind() const noexcept { return kind_of(code_); }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) { throw error(code, message); }

inline void require(bool ok, errc code, const std::string& message) {
    if (!ok) raise(code, message);
}

} // namespace probcal
