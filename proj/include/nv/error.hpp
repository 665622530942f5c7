#pragma once

#include <stdexcept>
#include <string>

namespace nv {

// Error categories. Each maps to a distinct CLI exit code (see tools/).
enum class Errc {
    DimensionMismatch = 1,
    SingularMassMatrix,
    UnsupportedSystem,
    RejectionBudgetExceeded,
    Divergence,
    ModelSystemMismatch,
    StepSizeMismatch,
    SamplingMismatch,
    NonFiniteLoss,
    FormatVersionMismatch,
    ChecksumMismatch,
    TruncatedFile,
    EmptySplit,
    ShapeMismatch,
    TimeAxisMismatch,
    EmptyRange,
    DegenerateVariance,
    ConfigParse,
    MissingInput,
    Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

}  // namespace nv
