#include "srmimo/error.hpp"

namespace srmimo
{

std::string_view to_string(Errc code)
{
    switch (code)
    {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonHermitian: return "NonHermitian";
    case Errc::NotPsd: return "NotPSD";
    case Errc::BadCoefficient: return "BadCoefficient";
    case Errc::BadDimensions: return "BadDimensions";
    case Errc::SingularChannel: return "SingularChannel";
    case Errc::RootNotBracketed: return "RootNotBracketed";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::NoClipping: return "NoClipping";
    case Errc::NoRoot: return "NoRoot";
    case Errc::OutOfSupport: return "OutOfSupport";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooManyRejections: return "TooManyRejections";
    }
    return "Unknown";
}

Error::Error(Errc code, std::string operation, const std::string &message)
    : std::runtime_error(operation + ": " + std::string(to_string(code)) + ": " + message),
      code_(code),
      operation_(std::move(operation))
{
}

} // namespace srmimo
