#pragma once

#include "plectic/abel_jacobi.hpp"
#include "plectic/complex_torus.hpp"
#include "plectic/flat_hodge.hpp"
#include "plectic/json_io.hpp"
#include "plectic/lattice.hpp"
#include "plectic/number_field.hpp"
#include "plectic/plectic_hodge.hpp"
#include "plectic/quadrature.hpp"
#include "plectic/real_multiplication.hpp"
#include "plectic/shimura_model.hpp"
