#pragma once

#include <stdexcept>
#include <string>

namespace gqed {

enum class ErrorKind { Config, Solver, Validation };

class Error : public std::runtime_error {
public:
    Error(std::string name, ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), name_(std::move(name)), kind_(kind) {}
    const std::string& name() const { return name_; }
    ErrorKind kind() const { return kind_; }

private:
    std::string name_;
    ErrorKind kind_;
};

#define GQED_ERROR(Name, Kind)                                               \
    struct Name : Error {                                                    \
        explicit Name(const std::string& m) : Error(#Name, Kind, m) {}       \
    };

GQED_ERROR(PoleProximity, ErrorKind::Solver)
GQED_ERROR(PoleOutOfRange, ErrorKind::Solver)
GQED_ERROR(TailMismatch, ErrorKind::Solver)
GQED_ERROR(NoConvergence, ErrorKind::Solver)
GQED_ERROR(SingularSystem, ErrorKind::Solver)
GQED_ERROR(GridTooCoarse, ErrorKind::Solver)
GQED_ERROR(MissingF12, ErrorKind::Solver)
GQED_ERROR(DegenerateNormalization, ErrorKind::Solver)
GQED_ERROR(ExtrapolationUnstable, ErrorKind::Solver)
GQED_ERROR(ResidualTooLarge, ErrorKind::Solver)
GQED_ERROR(ConservationViolation, ErrorKind::Validation)
GQED_ERROR(ParseError, ErrorKind::Config)
GQED_ERROR(ValidationError, ErrorKind::Config)

#undef GQED_ERROR

}  // namespace gqed
