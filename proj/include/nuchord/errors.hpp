#pragma once

#include <stdexcept>
#include <string>

namespace nuchord {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define NUCHORD_DEFINE_ERROR(Name)     \
  struct Name : Error {                \
    using Error::Error;                \
  }

NUCHORD_DEFINE_ERROR(DomainMismatch);
NUCHORD_DEFINE_ERROR(EvaluationAtInfinityUndefined);
NUCHORD_DEFINE_ERROR(GridMismatch);
NUCHORD_DEFINE_ERROR(NoConvergence);
NUCHORD_DEFINE_ERROR(CurveThroughZero);
NUCHORD_DEFINE_ERROR(NonResolvableWinding);
NUCHORD_DEFINE_ERROR(NotInvertible);
NUCHORD_DEFINE_ERROR(APNotInvertible);
NUCHORD_DEFINE_ERROR(VariantMismatch);
NUCHORD_DEFINE_ERROR(NotInvertibleOnCircle);
NUCHORD_DEFINE_ERROR(IndexNotStabilized);
NUCHORD_DEFINE_ERROR(MissingWitness);
NUCHORD_DEFINE_ERROR(NotCoprime);
NUCHORD_DEFINE_ERROR(SolveFailed);
NUCHORD_DEFINE_ERROR(NotAUnit);
NUCHORD_DEFINE_ERROR(SpectralFactorizationFailed);
NUCHORD_DEFINE_ERROR(NotNormalized);
NUCHORD_DEFINE_ERROR(DegenerateDenominator);
NUCHORD_DEFINE_ERROR(NotStabilizing);
NUCHORD_DEFINE_ERROR(ParseError);

#undef NUCHORD_DEFINE_ERROR

}  // namespace nuchord
