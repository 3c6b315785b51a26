#pragma once

#include "core.hpp"
#include "potential.hpp"
#include "monodromy.hpp"
#include "quadrature.hpp"
#include "roots.hpp"
#include "bounds.hpp"
#include "spectrum.hpp"
#include "polynomial.hpp"
#include "contours.hpp"
#include "canonical.hpp"
#include "finite_gap.hpp"
#include "continuation.hpp"
