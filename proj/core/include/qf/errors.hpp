#ifndef QF_ERRORS_HPP
#define QF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qf {

/// Failure categories surfaced by the library. Names match the conditions
/// they guard: parameter validation, branch tracking, chart domains, etc.
enum class errc {
    all_zero_parameters,
    nonpositive_mu,
    zero_scale,
    degenerate_seed,
    identically_zero_cubic,
    singular_bracket,
    branch_collision,
    step_underflow,
    out_of_range,
    linear_case_unsupported,
    chart_domain,
    slope_unclassifiable,
    vanishing_f1,
    divergent_combination,
    config_error,
    io_error,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

} // namespace qf

#endif
