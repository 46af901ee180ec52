#pragma once

#include "petzkit/errors.hpp"
#include "petzkit/linops.hpp"
#include "petzkit/hilbert.hpp"
#include "petzkit/spinchain.hpp"
#include "petzkit/thermal.hpp"
#include "petzkit/petz.hpp"
#include "petzkit/bounds.hpp"
#include "petzkit/rbm.hpp"
#include "petzkit/spectral.hpp"
