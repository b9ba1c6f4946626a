// cavityspec.hpp - umbrella header

#pragma once

#include "cavityspec/error.hpp"
#include "cavityspec/model.hpp"
#include "cavityspec/quadrature.hpp"
#include "cavityspec/spectral.hpp"
#include "cavityspec/lattice.hpp"
#include "cavityspec/matsubara.hpp"
#include "cavityspec/critical.hpp"
#include "cavityspec/fit.hpp"
#include "cavityspec/config.hpp"
#include "cavityspec/emit.hpp"
