#pragma once

#include <stdexcept>
#include <string>

namespace qkdv {

/// p has no d/dx-antiderivative in Q[u].
struct NotInImage : std::runtime_error {
    explicit NotInImage(const std::string& what) : std::runtime_error(what) {}
};

/// The density recursion produced inconsistent data (implementation bug).
struct RecursionInconsistent : std::runtime_error {
    explicit RecursionInconsistent(const std::string& what) : std::runtime_error(what) {}
};

/// The series is not a quasimodular form of the requested weight bound.
struct NotRecognized : std::runtime_error {
    explicit NotRecognized(const std::string& what) : std::runtime_error(what) {}
};

/// Recognition was attempted with too few q-series coefficients.
struct InsufficientOrder : std::runtime_error {
    explicit InsufficientOrder(const std::string& what) : std::runtime_error(what) {}
};

/// The commuting family fails to separate two eigenvectors.
struct DegenerateSpectrum : std::runtime_error {
    explicit DegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qkdv
