#pragma once

#include <stdexcept>
#include <string>

namespace platoonid {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input bytes do not parse (bad hex, wrong length, unknown field).
struct EncodingError : Error {
    using Error::Error;
};

// Bytes parsed but do not name a valid group element (off-curve,
// non-canonical coordinate, wrong subgroup, identity where forbidden).
// Deliberately distinct from a false verification verdict.
struct MalformedPointError : EncodingError {
    using EncodingError::EncodingError;
};

struct InvalidIdentifierError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// protocol
struct AlreadyMemberError : Error {
    using Error::Error;
};
struct MissingVerifierKeyError : Error {
    using Error::Error;
};
struct NotAVerifierError : Error {
    using Error::Error;
};
struct DuplicateVoteError : Error {
    using Error::Error;
};
struct MaxAttemptsExceededError : Error {
    using Error::Error;
};

// reputation
struct InsufficientMembersError : Error {
    using Error::Error;
};
struct DuplicateUpdateError : Error {
    using Error::Error;
};

// ledger
struct DuplicateKeyError : Error {
    using Error::Error;
};
struct EndorsementShortfallError : Error {
    using Error::Error;
};
struct InvalidEndorsementError : Error {
    using Error::Error;
};
struct ValidationFailureError : Error {
    using Error::Error;
};
struct UnknownPeerError : Error {
    using Error::Error;
};
struct UnknownParticipantError : Error {
    using Error::Error;
};
struct AccessDeniedError : Error {
    using Error::Error;
};

// simnet
struct UnknownTargetError : Error {
    using Error::Error;
};

}  // namespace platoonid
