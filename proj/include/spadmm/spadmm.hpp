#pragma once

#include "spadmm/constants.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"
#include "spadmm/lp.hpp"
#include "spadmm/convex_set.hpp"
#include "spadmm/lmo.hpp"
#include "spadmm/problem.hpp"
#include "spadmm/objectives.hpp"
#include "spadmm/block_solvers.hpp"
#include "spadmm/diagnostics.hpp"
#include "spadmm/driver.hpp"
#include "spadmm/spfw.hpp"
#include "spadmm/benchmarks.hpp"
#include "spadmm/io.hpp"
