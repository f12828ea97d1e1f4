#pragma once

#include "fbrs/error.hpp"
#include "fbrs/potential.hpp"
#include "fbrs/radial.hpp"
#include "fbrs/quadrature.hpp"
#include "fbrs/ode.hpp"
#include "fbrs/dynamics.hpp"
#include "fbrs/fbrs_vector.hpp"
#include "fbrs/bertrand.hpp"
#include "fbrs/verify.hpp"
