#pragma once

#include <stdexcept>
#include <string>

namespace hogibbs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HOGIBBS_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(#Name ": " + what) {}         \
  }

HOGIBBS_DEFINE_ERROR(ConfigError);
HOGIBBS_DEFINE_ERROR(StateSpaceTooLarge);
HOGIBBS_DEFINE_ERROR(SubsetSpaceTooLarge);
HOGIBBS_DEFINE_ERROR(DimensionMismatch);
HOGIBBS_DEFINE_ERROR(DobrushinViolated);
HOGIBBS_DEFINE_ERROR(EpsilonTooSmall);
HOGIBBS_DEFINE_ERROR(NonConvexBoundFunction);
HOGIBBS_DEFINE_ERROR(NonFerromagnetic);
HOGIBBS_DEFINE_ERROR(InsufficientTrials);
HOGIBBS_DEFINE_ERROR(GenerationFailure);
HOGIBBS_DEFINE_ERROR(UnattainableTauStar);

#undef HOGIBBS_DEFINE_ERROR

}  // namespace hogibbs
