#pragma once

#include "qsl/boundary.hpp"
#include "qsl/coefficients.hpp"
#include "qsl/complex2.hpp"
#include "qsl/convergence.hpp"
#include "qsl/errors.hpp"
#include "qsl/ode.hpp"
#include "qsl/parallel.hpp"
#include "qsl/piecewise.hpp"
#include "qsl/quadrature.hpp"
#include "qsl/quasi.hpp"
#include "qsl/spectral.hpp"
#include "qsl/trajectory.hpp"
