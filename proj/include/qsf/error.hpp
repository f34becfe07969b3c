#pragma once

#include <stdexcept>
#include <string>

namespace qsf {

enum class Errc {
    not_irreducible,
    not_primitive,
    unsupported_size,
    orbit_mismatch,
    budget_exceeded,
    not_coprime,
    wrong_characteristic,
    bad_format,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::not_irreducible:      return "NotIrreducible";
        case Errc::not_primitive:        return "NotPrimitive";
        case Errc::unsupported_size:     return "UnsupportedSize";
        case Errc::orbit_mismatch:       return "OrbitMismatch";
        case Errc::budget_exceeded:      return "BudgetExceeded";
        case Errc::not_coprime:          return "NotCoprime";
        case Errc::wrong_characteristic: return "WrongCharacteristic";
        case Errc::bad_format:           return "BadFormat";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace qsf
