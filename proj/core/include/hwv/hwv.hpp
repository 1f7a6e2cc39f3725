#pragma once

#include "hwv/adaptive.hpp"
#include "hwv/csv.hpp"
#include "hwv/errors.hpp"
#include "hwv/galerkin.hpp"
#include "hwv/harness.hpp"
#include "hwv/operator.hpp"
#include "hwv/spectral.hpp"
#include "hwv/theory.hpp"
#include "hwv/threshold.hpp"
#include "hwv/vaguelette.hpp"
#include "hwv/wavelet.hpp"
