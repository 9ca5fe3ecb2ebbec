#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mpsqc {

using cd = std::complex<double>;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bond dimension beyond what the compiler supports (> 4)
struct UnsupportedBondDimension : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// central tolerance knobs; property tests reference these rather than inlining numbers
namespace tol {
inline constexpr double atol = 1e-10;
inline constexpr double svd_cutoff = 1e-12;
inline constexpr double isometry = 1e-8;
inline constexpr double fidelity_exact = 1e-9;
}  // namespace tol

}  // namespace mpsqc
