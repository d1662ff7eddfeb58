#pragma once

// Everything in the library.

#include "kahler/error.hpp"
#include "kahler/hermitian.hpp"
#include "kahler/jet.hpp"
#include "kahler/spectral.hpp"
#include "kahler/geometry.hpp"
#include "kahler/curvature_tensor.hpp"
#include "kahler/curvature.hpp"
#include "kahler/monge_ampere.hpp"
#include "kahler/inequalities.hpp"
#include "kahler/integrals.hpp"
#include "kahler/zoo.hpp"
#include "kahler/io.hpp"
