#pragma once

#include <stdexcept>
#include <string>

namespace tubekit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define TUBEKIT_ERROR(Name)                      \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

// Expression evaluation hit a singularity (division by zero, log of a
// non-positive value, even root of a negative value, non-finite result).
TUBEKIT_ERROR(DomainError);
// Point tuple length does not match the chart dimension.
TUBEKIT_ERROR(ArityError);
TUBEKIT_ERROR(ParseError);
TUBEKIT_ERROR(SingularMetric);
TUBEKIT_ERROR(MissingBaseACS);
TUBEKIT_ERROR(NotOrthonormal);
TUBEKIT_ERROR(BadCase);
TUBEKIT_ERROR(OutsideDomain);
TUBEKIT_ERROR(BoundaryGuardViolation);
TUBEKIT_ERROR(EmptyInnerTube);
TUBEKIT_ERROR(ManifestError);
TUBEKIT_ERROR(UnknownSuite);
TUBEKIT_ERROR(InvariantViolation);
TUBEKIT_ERROR(IOError);

#undef TUBEKIT_ERROR

}  // namespace tubekit
