#pragma once

// Numerical inverse Z-transform toolkit: expression parsing, three inversion
// methods (annulus least squares, unit-circle DFT, contour quadrature), the
// geometric aliasing-error model, and a truncated-series oracle for checking
// all of them.

#include "core.hpp"
#include "zexpr.hpp"
#include "series.hpp"
#include "invlsq.hpp"
#include "invdft.hpp"
#include "invquad.hpp"
