#pragma once

#include "hom/ensemble.hpp"
#include "hom/error.hpp"
#include "hom/gaussian.hpp"
#include "hom/grid.hpp"
#include "hom/interference.hpp"
#include "hom/montecarlo.hpp"
#include "hom/quadrature.hpp"
#include "hom/random.hpp"
#include "hom/version.hpp"
#include "hom/wavepacket.hpp"
