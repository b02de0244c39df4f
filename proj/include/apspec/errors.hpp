#pragma once

#include <stdexcept>
#include <string>

namespace apspec {

// Base class for everything this library throws deliberately.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define APSPEC_DEFINE_ERROR(NAME)                                            \
    struct NAME : Error {                                                    \
        explicit NAME(const std::string& what)                               \
            : Error(std::string(#NAME) + ": " + what) {}                     \
    }

APSPEC_DEFINE_ERROR(UnknownSystem);
APSPEC_DEFINE_ERROR(InvalidParameter);
APSPEC_DEFINE_ERROR(GroupMismatch);
APSPEC_DEFINE_ERROR(DomainMismatch);
APSPEC_DEFINE_ERROR(EmptyFamily);
APSPEC_DEFINE_ERROR(SampleFailure);
APSPEC_DEFINE_ERROR(NonRealProfile);
APSPEC_DEFINE_ERROR(MissingZero);
APSPEC_DEFINE_ERROR(WindowTooSmall);
APSPEC_DEFINE_ERROR(InvalidWindow);
APSPEC_DEFINE_ERROR(SupportOutOfWindow);
APSPEC_DEFINE_ERROR(UnsupportedGroup);
APSPEC_DEFINE_ERROR(ConfigInvalid);
APSPEC_DEFINE_ERROR(SchemaMismatch);

#undef APSPEC_DEFINE_ERROR

} // namespace apspec
