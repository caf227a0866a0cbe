#ifndef KLEIN_KLEIN_HPP
#define KLEIN_KLEIN_HPP

// Umbrella header: the extremal first-eigenvalue machinery for the Klein
// bottle, end to end. See README.md for the component map.

#include "klein/elliptic.hpp"
#include "klein/geometry.hpp"
#include "klein/ode_solve.hpp"
#include "klein/ode_system.hpp"
#include "klein/periods.hpp"
#include "klein/spectral.hpp"
#include "klein/verify.hpp"

#endif
