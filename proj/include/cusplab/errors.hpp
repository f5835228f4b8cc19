#pragma once

#include <stdexcept>
#include <string>

namespace cusplab {

// Base of every error raised by the library. name() is the short error
// identifier reported by the command-line front end.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define CUSPLAB_DECLARE_ERROR(Type)                                  \
  class Type : public Error {                                        \
   public:                                                           \
    explicit Type(const std::string& what) : Error(#Type, what) {}   \
  }

// specialfn
CUSPLAB_DECLARE_ERROR(DomainError);
CUSPLAB_DECLARE_ERROR(OverflowError);
CUSPLAB_DECLARE_ERROR(NonConvergence);
// potential
CUSPLAB_DECLARE_ERROR(OutOfTableRange);
CUSPLAB_DECLARE_ERROR(ClassificationAmbiguous);
CUSPLAB_DECLARE_ERROR(InvalidModel);
// radial
CUSPLAB_DECLARE_ERROR(NonphysicalPotential);
CUSPLAB_DECLARE_ERROR(StepFailure);
CUSPLAB_DECLARE_ERROR(StiffnessLimit);
CUSPLAB_DECLARE_ERROR(EvaluationAtNode);
CUSPLAB_DECLARE_ERROR(ExtrapolationDiverged);
// rigidity
CUSPLAB_DECLARE_ERROR(NodeProximity);
CUSPLAB_DECLARE_ERROR(PoleStraddle);
// energyseries
CUSPLAB_DECLARE_ERROR(CompanionUnavailable);
// separability
CUSPLAB_DECLARE_ERROR(CoincidentParticles);
CUSPLAB_DECLARE_ERROR(DifferentiationFailure);
CUSPLAB_DECLARE_ERROR(FitDegenerate);
// cli
CUSPLAB_DECLARE_ERROR(ConfigError);

#undef CUSPLAB_DECLARE_ERROR

}  // namespace cusplab
