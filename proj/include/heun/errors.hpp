#pragma once

#include <stdexcept>
#include <string>

namespace heun {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HEUN_ERROR(Name)                                   \
    struct Name : Error {                                  \
        explicit Name(const std::string& m) : Error(#Name ": " + m) {} \
    };

HEUN_ERROR(InvalidArgument)
HEUN_ERROR(NonFinite)
HEUN_ERROR(DimensionMismatch)
HEUN_ERROR(NotHermitian)
HEUN_ERROR(NoConvergence)
HEUN_ERROR(ZeroPolynomial)
HEUN_ERROR(SingularMatrix)
HEUN_ERROR(SpinMismatch)
HEUN_ERROR(DegenerateX)
HEUN_ERROR(IndexOutOfRange)
HEUN_ERROR(SpectralSingularity)
HEUN_ERROR(ZeroVector)
HEUN_ERROR(DegenerateRecurrence)
HEUN_ERROR(SingularConfiguration)
HEUN_ERROR(ExtrapolationUnstable)
HEUN_ERROR(ResidualFailure)
HEUN_ERROR(BranchCountMismatch)
HEUN_ERROR(NotReduced)
HEUN_ERROR(ParameterOutOfRange)
HEUN_ERROR(ZeroPivot)
HEUN_ERROR(SpectrumOutOfRange)

#undef HEUN_ERROR

}  // namespace heun
