// SPDX-License-Identifier: Apache-2.0
#include "vf/error.hpp"

namespace vf {

const char* to_string(Errc e)
{
    switch (e)
    {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::not_on_boundary: return "NotOnBoundary";
        case Errc::root_find_failure: return "RootFindFailure";
        case Errc::zero_velocity: return "ZeroVelocity";
        case Errc::invalid_exponent: return "InvalidExponent";
        case Errc::asymptote_mismatch: return "AsymptoteMismatch";
        case Errc::quadrature_too_coarse: return "QuadratureTooCoarse";
        case Errc::grid_mismatch: return "GridMismatch";
        case Errc::not_non_cutoff: return "NotNonCutoff";
        case Errc::empty_target_ball: return "EmptyTargetBall";
        case Errc::missing_bound: return "MissingBound";
        case Errc::non_convergence: return "NonConvergence";
        case Errc::grazing_constants_missing: return "GrazingConstantsMissing";
        case Errc::fit_rejected: return "FitRejected";
        case Errc::schedule_invalid: return "ScheduleInvalid";
        case Errc::sampling_too_coarse: return "SamplingTooCoarse";
        case Errc::stability_violation: return "StabilityViolation";
        case Errc::config_error: return "ConfigError";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

}  // namespace vf
