// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vf {

enum class Errc
{
    invalid_argument,
    not_on_boundary,
    root_find_failure,
    zero_velocity,
    invalid_exponent,
    asymptote_mismatch,
    quadrature_too_coarse,
    grid_mismatch,
    not_non_cutoff,
    empty_target_ball,
    missing_bound,
    non_convergence,
    grazing_constants_missing,
    fit_rejected,
    schedule_invalid,
    sampling_too_coarse,
    stability_violation,
    config_error,
    io_error,
};

const char* to_string(Errc e);

class Error : public std::runtime_error
{
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    Errc code() const { return code_; }

  private:
    Errc code_;
};

#define VF_REQUIRE(COND, CODE, MSG)                \
    do                                             \
    {                                              \
        if (!(COND))                               \
        {                                          \
            throw ::vf::Error(::vf::Errc::CODE, MSG); \
        }                                          \
    } while (0)

}  // namespace vf
