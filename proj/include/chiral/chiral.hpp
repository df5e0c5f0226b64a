#pragma once

#include "chiral/anomaly.hpp"
#include "chiral/block_operator.hpp"
#include "chiral/config.hpp"
#include "chiral/fock.hpp"
#include "chiral/lattice.hpp"
#include "chiral/runner.hpp"
#include "chiral/single_particle.hpp"
#include "chiral/spinor.hpp"
#include "chiral/trig_polynomial.hpp"
