#pragma once

// Convenience header pulling in the whole library.

#include "errors.hpp"
#include "drive.hpp"
#include "model.hpp"
#include "real_space.hpp"
#include "dirac.hpp"
#include "response.hpp"
#include "parallel.hpp"
#include "oracle.hpp"
#include "raman.hpp"
#include "io.hpp"
#include "config.hpp"

namespace anomalylab {
inline constexpr const char* kVersion = "0.1.0";
} // namespace anomalylab
