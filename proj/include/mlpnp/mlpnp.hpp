#pragma once

#include "mlpnp/camera.hpp"
#include "mlpnp/errors.hpp"
#include "mlpnp/residual.hpp"
#include "mlpnp/rotation.hpp"
#include "mlpnp/solver.hpp"
#include "mlpnp/tangent.hpp"
#include "mlpnp/types.hpp"
#include "mlpnp/uncertainty.hpp"
