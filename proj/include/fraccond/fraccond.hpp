#pragma once

#include "fraccond/core/error.hpp"
#include "fraccond/core/grid.hpp"
#include "fraccond/core/parallel.hpp"
#include "fraccond/core/special.hpp"
#include "fraccond/forward/dirichlet.hpp"
#include "fraccond/forward/dn_map.hpp"
#include "fraccond/forward/potential.hpp"
#include "fraccond/forward/reduction.hpp"
#include "fraccond/inverse/config.hpp"
#include "fraccond/inverse/reconstruct.hpp"
#include "fraccond/limits/limits.hpp"
#include "fraccond/operators/conductivity.hpp"
#include "fraccond/operators/fractional_gradient.hpp"
#include "fraccond/operators/nonlocal.hpp"
#include "fraccond/operators/spectral.hpp"
#include "fraccond/walk/generator.hpp"
#include "fraccond/walk/monte_carlo.hpp"
#include "fraccond/walk/params.hpp"
