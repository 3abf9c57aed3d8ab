#pragma once

#include "rng.hpp"
#include "lattice.hpp"
#include "potential.hpp"
#include "polyalg.hpp"
#include "resonance.hpp"
#include "lieflow.hpp"
#include "birkhoff.hpp"
#include "simulator.hpp"
#include "serialize.hpp"
