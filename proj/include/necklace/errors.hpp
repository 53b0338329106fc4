#pragma once

#include <stdexcept>
#include <string>

namespace necklace {

enum class Errc {
    not_stochastic,
    extra_absorbing,
    unreachable,
    span_violation,
    horizon_exceeded,
    degenerate_variance,
    no_beads,
    unknown_pattern,
    dimension_mismatch,
    nonpositive_c,
    invalid_start,
    out_of_range,
    not_stationary,
    zero_mass_state,
    not_reversible,
    support_violation,
    disconnected,
    invalid_path,
    numerical_drift,
};

const char* errc_name(Errc code);

/// Domain error carrying the violated invariant as a code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace necklace
