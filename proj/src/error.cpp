#include "rawbyte/error.hpp"

namespace rawbyte {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::UnknownMagic: return "UnknownMagic";
    case ErrorKind::TruncatedRecord: return "TruncatedRecord";
    case ErrorKind::EmptyUnit: return "EmptyUnit";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::BadHexLine: return "BadHexLine";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::StaleCache: return "StaleCache";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
    case ErrorKind::CorruptModelFile: return "CorruptModelFile";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::LockHeld: return "LockHeld";
    case ErrorKind::SpecConflict: return "SpecConflict";
    case ErrorKind::VerifyMismatch: return "VerifyMismatch";
    }
    return "Unknown";
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::SpecConflict:
        return 2;
    case ErrorKind::Io:
    case ErrorKind::UnknownMagic:
    case ErrorKind::TruncatedRecord:
        return 3;
    case ErrorKind::EmptyUnit:
    case ErrorKind::ClassTooSmall:
    case ErrorKind::BadHexLine:
    case ErrorKind::LengthMismatch:
    case ErrorKind::EmptyMatrix:
        return 4;
    case ErrorKind::ShapeMismatch:
    case ErrorKind::InvalidLabel:
    case ErrorKind::StaleCache:
    case ErrorKind::CorruptModelFile:
        return 5;
    case ErrorKind::DivergedLoss:
        return 6;
    case ErrorKind::LockHeld:
        return 7;
    case ErrorKind::VerifyMismatch:
        return 8;
    }
    return 1;
}

}  // namespace rawbyte
