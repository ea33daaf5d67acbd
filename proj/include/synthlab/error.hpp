#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace synthlab {

enum class ErrorCode {
    // validation
    EmptyLabel,
    EmptyNote,
    EmptyOwner,
    NeedTwoGroups,
    DuplicateGroup,
    MissingSource,
    UnknownSource,
    DanglingReference,
    ScopeViolation,
    InvalidRequest,
    ConfigError,
    // lookup
    UnknownSession,
    UnknownAnnotation,
    UnknownGroup,
    UnknownEntity,
    UnknownDocument,
    NotAMember,
    // conflicts
    GroupArchived,
    SameGroup,
    // ingest
    AuthError,
    TransportError,
    SchemaError,
    FileError,
    // persistence
    MalformedLog,
    CorruptLog,
    DataDirError,
    BindError,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every synthlab operation. The code is what callers branch
/// on; the message carries the offending id, token or record index.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace synthlab
