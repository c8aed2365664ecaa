#ifndef CRB_ERRORS_HPP
#define CRB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crb {

enum class ErrorKind {
    // usage / configuration
    InvalidConfig,
    InvalidDensity,
    PreconditionViolated,
    // data / schema
    ParseError,
    MissingColumn,
    UnknownVertex,
    VertexMismatch,
    CycleDetected,
    InsufficientData,
    InsufficientSamples,
    ArityMismatch,
    InsufficientVariation,
    // numeric
    RankDeficient,
    NotPositiveDefinite,
    SingularSystem,
    ZeroResidualVariance,
    SingularFeatureBlock,
    DegenerateCorrelation,
    AllGapsNonpositive,
};

// Exit-status buckets used by the command line tools:
// 2 = usage/config, 3 = data/schema, 4 = numeric failure.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
            case ErrorKind::InvalidConfig:
            case ErrorKind::InvalidDensity:
            case ErrorKind::PreconditionViolated:
                return 2;
            case ErrorKind::ParseError:
            case ErrorKind::MissingColumn:
            case ErrorKind::UnknownVertex:
            case ErrorKind::VertexMismatch:
            case ErrorKind::CycleDetected:
            case ErrorKind::InsufficientData:
            case ErrorKind::InsufficientSamples:
            case ErrorKind::ArityMismatch:
            case ErrorKind::InsufficientVariation:
                return 3;
            default:
                return 4;
        }
    }

private:
    ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

}  // namespace crb

#endif
