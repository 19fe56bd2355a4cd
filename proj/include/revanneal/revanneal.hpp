#pragma once

#include "dynamics_ara.hpp"
#include "dynamics_sra.hpp"
#include "io.hpp"
#include "landscape.hpp"
#include "model.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "phase_diagram.hpp"
