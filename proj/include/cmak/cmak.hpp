#pragma once

#include "cmak/carma.hpp"
#include "cmak/error.hpp"
#include "cmak/estimation.hpp"
#include "cmak/polynomial.hpp"
#include "cmak/quadrature.hpp"
#include "cmak/random.hpp"
#include "cmak/simulation.hpp"
#include "cmak/spectral_empirical.hpp"
#include "cmak/spectral_theory.hpp"
#include "cmak/studies.hpp"
#include "cmak/wold.hpp"
