#pragma once

#include "spectrakit/an.hpp"
#include "spectrakit/commutator.hpp"
#include "spectrakit/dense.hpp"
#include "spectrakit/envelope.hpp"
#include "spectrakit/errors.hpp"
#include "spectrakit/io.hpp"
#include "spectrakit/operator.hpp"
#include "spectrakit/perturbation.hpp"
#include "spectrakit/spectral.hpp"
#include "spectrakit/tail.hpp"
