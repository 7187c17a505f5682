#pragma once

#include <stdexcept>
#include <string>

namespace melaseg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable or corrupt image file.
struct DecodeError : Error {
    using Error::Error;
};

// Wrong file schema: missing CSV columns, non-grayscale mask, bad model file.
struct FormatError : Error {
    using Error::Error;
};

// Operation requires a non-empty lesion mask.
struct NoLesionError : Error {
    using Error::Error;
};

// Co-occurrence accumulation found no valid pixel pair.
struct NoPairsError : Error {
    using Error::Error;
};

// Lesion and skin markers are too close to separate anything.
struct DegenerateMarkersError : Error {
    using Error::Error;
};

// Caller violated a documented precondition (seed out of bounds, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// Solver hit its iteration cap before reaching the KKT tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace melaseg
