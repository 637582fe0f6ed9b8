#pragma once

#include "tmodes/dynamics.hpp"
#include "tmodes/errors.hpp"
#include "tmodes/io.hpp"
#include "tmodes/polynomial.hpp"
#include "tmodes/quartic.hpp"
#include "tmodes/spectra.hpp"
#include "tmodes/version.hpp"
