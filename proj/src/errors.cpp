#include "necklace/errors.hpp"

namespace necklace {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::not_stochastic: return "not_stochastic";
    case Errc::extra_absorbing: return "extra_absorbing";
    case Errc::unreachable: return "unreachable";
    case Errc::span_violation: return "span_violation";
    case Errc::horizon_exceeded: return "horizon_exceeded";
    case Errc::degenerate_variance: return "degenerate_variance";
    case Errc::no_beads: return "no_beads";
    case Errc::unknown_pattern: return "unknown_pattern";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::nonpositive_c: return "nonpositive_c";
    case Errc::invalid_start: return "invalid_start";
    case Errc::out_of_range: return "out_of_range";
    case Errc::not_stationary: return "not_stationary";
    case Errc::zero_mass_state: return "zero_mass_state";
    case Errc::not_reversible: return "not_reversible";
    case Errc::support_violation: return "support_violation";
    case Errc::disconnected: return "disconnected";
    case Errc::invalid_path: return "invalid_path";
    case Errc::numerical_drift: return "numerical_drift";
    }
    return "unknown";
}

} // namespace necklace
