#pragma once

#include <stdexcept>
#include <string>

namespace qgtlab {

/// Base class for every error raised by the library. The CLI maps subclasses
/// onto exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QGTLAB_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

// numkit
QGTLAB_DEFINE_ERROR(InvalidMatrix);
QGTLAB_DEFINE_ERROR(NumericalFailure);
QGTLAB_DEFINE_ERROR(DomainError);
QGTLAB_DEFINE_ERROR(NoOscillation);
QGTLAB_DEFINE_ERROR(InvalidTrace);

// models
QGTLAB_DEFINE_ERROR(NotBlockDecomposable);
QGTLAB_DEFINE_ERROR(UnknownParam);
QGTLAB_DEFINE_ERROR(InvalidArgument);

// qgt
QGTLAB_DEFINE_ERROR(DegeneracyCollision);
QGTLAB_DEFINE_ERROR(GaugeAlignmentFailure);

// dynamics
QGTLAB_DEFINE_ERROR(IntegrationUnstable);
QGTLAB_DEFINE_ERROR(BlockLeakage);
QGTLAB_DEFINE_ERROR(InconsistentFit);

// topology
QGTLAB_DEFINE_ERROR(InvalidSample);
QGTLAB_DEFINE_ERROR(GaplessModel);
QGTLAB_DEFINE_ERROR(MetricInconsistent);

// cli
QGTLAB_DEFINE_ERROR(ConfigInvalid);

#undef QGTLAB_DEFINE_ERROR

}  // namespace qgtlab
