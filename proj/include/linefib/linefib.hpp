#pragma once

// Umbrella header for the linefib library: expression parsing, dual-number
// jets, pointwise contact geometry, line-fibration audits, the winding and
// kernel-flow verifiers, and the rank-1 normal form with its standardizing
// diffeomorphism.

#include "linefib/diffgeo.hpp"
#include "linefib/dual.hpp"
#include "linefib/errors.hpp"
#include "linefib/expr.hpp"
#include "linefib/fibration.hpp"
#include "linefib/field.hpp"
#include "linefib/gallery.hpp"
#include "linefib/geometry.hpp"
#include "linefib/lemmas.hpp"
#include "linefib/spline.hpp"
#include "linefib/standardizer.hpp"
#include "linefib/version.hpp"
