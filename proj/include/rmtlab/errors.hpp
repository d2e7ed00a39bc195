#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

// Base of every error the library throws; kind() is the stable error name.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define RMT_DEFINE_ERROR(Name)                                           \
  class Name : public Error {                                            \
   public:                                                               \
    using Error::Error;                                                  \
    const char* kind() const noexcept override { return #Name; }         \
  };

RMT_DEFINE_ERROR(DomainError)
RMT_DEFINE_ERROR(PreconditionViolation)
RMT_DEFINE_ERROR(QuadratureFailure)
RMT_DEFINE_ERROR(InfeasibleMoments)
RMT_DEFINE_ERROR(RootNotBracketed)
RMT_DEFINE_ERROR(SinkhornDivergence)
RMT_DEFINE_ERROR(SupportTooWide)
RMT_DEFINE_ERROR(EigFailure)
RMT_DEFINE_ERROR(BranchAmbiguous)
RMT_DEFINE_ERROR(NonConvergence)
RMT_DEFINE_ERROR(NoContraction)
RMT_DEFINE_ERROR(NotOrthogonal)
RMT_DEFINE_ERROR(EmptyWindow)
RMT_DEFINE_ERROR(StatisticUnknown)
RMT_DEFINE_ERROR(InsufficientGaps)
RMT_DEFINE_ERROR(ConfigInvalid)
RMT_DEFINE_ERROR(IoError)

#undef RMT_DEFINE_ERROR

}  // namespace rmt
