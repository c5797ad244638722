#pragma once

#include <stdexcept>
#include <string>

namespace pollinglab {

enum class Errc {
    validation,             // bad parameter values (constructor/config level)
    parse,                  // malformed config document
    config,                 // inconsistent run configuration
    unstable,               // stability condition violated
    heavy_tail_no_lst,      // closed-form LST requested for a heavy-tailed law
    infinite_moment,
    non_convergence,        // iteration budget exhausted
    inversion_accuracy,     // transform inversion error estimate too large
    not_regularly_varying,
    quadrature_failure,
    asymmetric_model,
    root_not_found,
    empty_sample,
    non_exponential_service,
    aggregated_unstable,
    singular_system,
    series_diverging,
    dimension_mismatch,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace pollinglab
