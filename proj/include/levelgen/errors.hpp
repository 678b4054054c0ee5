#pragma once

#include <stdexcept>
#include <string>

namespace levelgen {

/// Base class for every error the engine reports.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define LEVELGEN_DEFINE_ERROR(Name)     \
  class Name : public Error {           \
  public:                               \
    using Error::Error;                 \
  };

// corpus
LEVELGEN_DEFINE_ERROR(UnknownSymbol)
LEVELGEN_DEFINE_ERROR(RaggedFile)
LEVELGEN_DEFINE_ERROR(LevelTooSmall)
LEVELGEN_DEFINE_ERROR(MisalignedDungeon)
LEVELGEN_DEFINE_ERROR(ShapeMismatch)
LEVELGEN_DEFINE_ERROR(BadVocabulary)

// genomes
LEVELGEN_DEFINE_ERROR(ArityMismatch)
LEVELGEN_DEFINE_ERROR(LayoutMismatch)
LEVELGEN_DEFINE_ERROR(IndexOutOfRange)
LEVELGEN_DEFINE_ERROR(InvalidGenome)

// decoder
LEVELGEN_DEFINE_ERROR(BadFormat)
LEVELGEN_DEFINE_ERROR(ShapeChainBroken)
LEVELGEN_DEFINE_ERROR(LatentSizeMismatch)

// assembly / evaluation
LEVELGEN_DEFINE_ERROR(OutOfRange)
LEVELGEN_DEFINE_ERROR(NoRoomsPresent)
LEVELGEN_DEFINE_ERROR(VocabMismatch)

// orchestration
LEVELGEN_DEFINE_ERROR(ConfigError)
LEVELGEN_DEFINE_ERROR(EmptyBin)

#undef LEVELGEN_DEFINE_ERROR

}  // namespace levelgen
