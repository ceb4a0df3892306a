#pragma once

#include "gapdet/airy.hpp"
#include "gapdet/contour.hpp"
#include "gapdet/core.hpp"
#include "gapdet/fredholm.hpp"
#include "gapdet/gap.hpp"
#include "gapdet/intervals.hpp"
#include "gapdet/pearcey.hpp"
#include "gapdet/quadrature.hpp"
#include "gapdet/isomono.hpp"
#include "gapdet/pdecheck.hpp"
#include "gapdet/tracy_widom.hpp"
#include "gapdet/job.hpp"
