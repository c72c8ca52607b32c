#pragma once

#include <stdexcept>
#include <string>

namespace p3ls {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define P3LS_DEFINE_ERROR(NAME)                                 \
  class NAME : public Error {                                   \
  public:                                                       \
    explicit NAME(const std::string& msg) : Error(msg) {}       \
  }

P3LS_DEFINE_ERROR(InvalidWindow);
P3LS_DEFINE_ERROR(InvalidBandwidth);
P3LS_DEFINE_ERROR(OutOfWindow);
P3LS_DEFINE_ERROR(NonFiniteEntry);
P3LS_DEFINE_ERROR(DimensionMismatch);
P3LS_DEFINE_ERROR(GridMismatch);
P3LS_DEFINE_ERROR(WindowMismatch);
P3LS_DEFINE_ERROR(IntensityOverflow);
P3LS_DEFINE_ERROR(TooFewSubjects);
P3LS_DEFINE_ERROR(AllCellsFloored);
P3LS_DEFINE_ERROR(NoPositiveEigenvalues);
P3LS_DEFINE_ERROR(DegenerateLikelihood);
P3LS_DEFINE_ERROR(NoIndependentCandidates);
P3LS_DEFINE_ERROR(PSelectionFailed);
P3LS_DEFINE_ERROR(RankDeficient);
P3LS_DEFINE_ERROR(UnknownCase);
P3LS_DEFINE_ERROR(ParseError);
P3LS_DEFINE_ERROR(FormatError);
P3LS_DEFINE_ERROR(EmptyFile);

#undef P3LS_DEFINE_ERROR

}  // namespace p3ls
