#pragma once

#include "vortexred/analysis.hpp"
#include "vortexred/dop853.hpp"
#include "vortexred/errors.hpp"
#include "vortexred/integrator.hpp"
#include "vortexred/io.hpp"
#include "vortexred/ode.hpp"
#include "vortexred/portrait.hpp"
#include "vortexred/quotient.hpp"
#include "vortexred/reduction.hpp"
#include "vortexred/symmetry.hpp"
#include "vortexred/verify.hpp"
#include "vortexred/vortex_dynamics.hpp"
