#pragma once

#include <cstdint>
#include <random>

#include "noetherq/types.hpp"

namespace noetherq {

// Deterministic sampling helpers. Every randomized routine in the library
// threads an explicit seed through one of these, never a global generator.
using Rng = std::mt19937_64;

Mat random_gaussian(int rows, int cols, Rng& rng);
Mat random_hermitian(int dim, Rng& rng);

// G G† scaled to unit Frobenius norm; PSD by construction.
Mat random_psd_unit(int dim, Rng& rng);

// PSD with unit trace.
Mat random_density(int dim, Rng& rng);

Mat random_unitary(int dim, Rng& rng);

}  // namespace noetherq
