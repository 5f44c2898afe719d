#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srmimo
{

enum class Errc
{
    InvalidArgument,
    NonHermitian,
    NotPsd,
    BadCoefficient,
    BadDimensions,
    SingularChannel,
    RootNotBracketed,
    NoConvergence,
    DegenerateDenominator,
    NoClipping,
    NoRoot,
    OutOfSupport,
    EmptyInput,
    TooManyRejections,
};

std::string_view to_string(Errc code);

// Numerical or contract failure raised by a library operation. `operation()`
// names the routine that failed so the CLI can report it.
class Error : public std::runtime_error
{
public:
    Error(Errc code, std::string operation, const std::string &message);

    Errc code() const noexcept { return code_; }
    const std::string &operation() const noexcept { return operation_; }

private:
    Errc code_;
    std::string operation_;
};

} // namespace srmimo
