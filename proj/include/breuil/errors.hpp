#pragma once

#include <stdexcept>
#include <string>

namespace breuil {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ring
struct NotAUnit : Error {
    explicit NotAUnit(const std::string& msg) : Error(msg) {}
};
struct InvalidLevels : Error {
    explicit InvalidLevels(const std::string& msg) : Error(msg) {}
};
struct ParamViolation : Error {
    explicit ParamViolation(const std::string& msg) : Error(msg) {}
};
struct ParamMismatch : Error {
    explicit ParamMismatch(const std::string& msg) : Error(msg) {}
};

// linalg
struct NotInvertible : Error {
    explicit NotInvertible(const std::string& msg) : Error(msg) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};
struct NotAPresentation : Error {
    explicit NotAPresentation(const std::string& msg) : Error(msg) {}
};

// phimod
struct CriteriaDisagree : Error {
    explicit CriteriaDisagree(const std::string& msg) : Error(msg) {}
};
struct SearchInconclusive : Error {
    explicit SearchInconclusive(const std::string& msg) : Error(msg) {}
};
struct InternalCheckFailed : Error {
    explicit InternalCheckFailed(const std::string& msg) : Error(msg) {}
};

// functors / abelian
struct LevelViolation : Error {
    explicit LevelViolation(const std::string& msg) : Error(msg) {}
};
struct RegimeViolation : Error {
    explicit RegimeViolation(const std::string& msg) : Error(msg) {}
};
struct VerificationFailed : Error {
    explicit VerificationFailed(const std::string& msg) : Error(msg) {}
};

// monodromy
struct RankViolation : Error {
    explicit RankViolation(const std::string& msg) : Error(msg) {}
};

// io
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace breuil
