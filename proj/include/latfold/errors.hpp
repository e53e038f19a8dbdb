#pragma once

#include <stdexcept>
#include <string>

namespace latfold {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// pbp
struct MissingVariableError : Error { using Error::Error; };

// lattice
struct WidthMismatchError : Error { using Error::Error; };
struct InvalidTurnError : Error { using Error::Error; };
struct InvalidFoldError : Error { using Error::Error; };
struct TooLargeError : Error { using Error::Error; };

// potentials
struct MissingPairError : Error { using Error::Error; };
struct AsymmetricEntryError : Error { using Error::Error; };
struct UnknownResidueError : Error { using Error::Error; };

// encoders
struct SequenceTooShortError : Error { using Error::Error; };
struct IndexOutOfRangeError : Error { using Error::Error; };
struct NoSlackRegisterError : Error { using Error::Error; };

// reduction / solve
struct CapExceededError : Error { using Error::Error; };
struct NotQuadraticError : Error { using Error::Error; };
struct DegenerateProbabilityError : Error { using Error::Error; };

// io
struct FormatError : Error { using Error::Error; };

}  // namespace latfold
