#pragma once

#include "ems/design.hpp"
#include "ems/entropy.hpp"
#include "ems/error.hpp"
#include "ems/eval.hpp"
#include "ems/matrix_io.hpp"
#include "ems/parallel.hpp"
#include "ems/recovery.hpp"
#include "ems/signals.hpp"
#include "ems/sparsify.hpp"
