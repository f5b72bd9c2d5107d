#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rawbyte {

// Every failure the toolkit reports carries one of these kinds. The CLI maps
// kinds onto exit codes (see exit_code_for).
enum class ErrorKind {
    InvalidArgument,
    Io,
    // packet_ingest
    UnknownMagic,
    TruncatedRecord,
    // byte_encoder
    EmptyUnit,
    ClassTooSmall,
    BadHexLine,
    // network
    ShapeMismatch,
    InvalidLabel,
    StaleCache,
    DivergedLoss,
    CorruptModelFile,
    // metrics_bench
    LengthMismatch,
    EmptyMatrix,
    LockHeld,
    // cli_app
    SpecConflict,
    VerifyMismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Process exit code for a failure of the given kind: 2 usage, 3 input,
// 4 dataset, 5 model, 6 training, 7 benchmark lock, 8 verification.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace rawbyte
