#pragma once

#include <stdexcept>
#include <string>

namespace fpa {

// Base for all domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

// Requested a density from a model that has atoms.
struct NoDensityError : Error {
    using Error::Error;
};

struct EmptyObservationsError : Error {
    using Error::Error;
};

struct NotInvertibleError : Error {
    using Error::Error;
};

struct ZeroDensityError : Error {
    using Error::Error;
};

struct ZeroDensityInWindowError : Error {
    using Error::Error;
};

struct AssumptionViolatedError : Error {
    using Error::Error;
};

// F(b*) == 0: the rivals always outbid the item value, best play is to sit out.
struct HopelessInstanceError : Error {
    using Error::Error;
};

struct InvalidHorizonError : Error {
    using Error::Error;
};

struct DegenerateIntervalError : Error {
    using Error::Error;
};

struct ProtocolViolationError : Error {
    using Error::Error;
};

struct NoWinsYetError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct EmptyAfterFilterError : Error {
    using Error::Error;
};

}  // namespace fpa
