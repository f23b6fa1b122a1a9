#pragma once

#include "collision_norm/errors.hpp"
#include "collision_norm/experiment.hpp"
#include "collision_norm/linalg.hpp"
#include "collision_norm/matrix.hpp"
#include "collision_norm/models.hpp"
#include "collision_norm/norms.hpp"
#include "collision_norm/riccati.hpp"
#include "collision_norm/simulate.hpp"
#include "collision_norm/state_space.hpp"
#include "collision_norm/synthesis.hpp"
#include "collision_norm/transfer_function.hpp"
