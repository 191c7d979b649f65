#pragma once

#include <stdexcept>
#include <string>

namespace torelli {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two values from different (prime, precision) or ring contexts were mixed.
struct ContextMismatch : Error {
    using Error::Error;
};

/// A linear system has no solution at the working precision.
struct NoSolutionAtPrecision : Error {
    using Error::Error;
};

/// Inversion was requested for an element whose constant term is not a unit.
struct NotAUnit : Error {
    using Error::Error;
};

/// A matrix inverse was requested but some elementary divisor is non-trivial.
struct NotInvertible : Error {
    using Error::Error;
};

/// A group word refers to a generator index outside the context's alphabet.
struct BadGeneratorIndex : Error {
    using Error::Error;
};

/// The operation is defined for the free kind only.
struct UnsupportedForSurface : Error {
    using Error::Error;
};

/// An endomorphism was required to be an automorphism but is not.
struct NotAnAutomorphism : Error {
    using Error::Error;
};

/// The truncation degree is too small for the requested computation.
struct DegreeTooSmall : Error {
    using Error::Error;
};

/// The endomorphism does not act trivially on the abelianization.
struct NotTorelli : Error {
    using Error::Error;
};

/// A surface-kind endomorphism does not respect the defining relation.
struct RelationNotPreserved : Error {
    using Error::Error;
};

/// A class-function computation failed to reduce to a rational number.
struct NonRationalResult : Error {
    using Error::Error;
};

/// decompose() was given a class function that is not a character.
struct NegativeMultiplicity : Error {
    using Error::Error;
};

/// No non-negative genus satisfies the requested ramification data.
struct NotRealizable : Error {
    using Error::Error;
};

/// A character table failed its consistency checks at load time.
struct MalformedTable : Error {
    using Error::Error;
};

/// A JSON document does not match the expected schema.
struct SchemaError : Error {
    using Error::Error;
};

} // namespace torelli
