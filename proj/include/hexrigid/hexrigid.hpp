#pragma once

#include "hexrigid/error.hpp"
#include "hexrigid/lattice.hpp"
#include "hexrigid/trigeom.hpp"
#include "hexrigid/patch.hpp"
#include "hexrigid/quasiharm.hpp"
#include "hexrigid/layout.hpp"
#include "hexrigid/solver.hpp"
