#pragma once

#include "secdyn/bottcher.hpp"
#include "secdyn/complex_io.hpp"
#include "secdyn/config.hpp"
#include "secdyn/dynamics.hpp"
#include "secdyn/errors.hpp"
#include "secdyn/golden.hpp"
#include "secdyn/mero_fn.hpp"
#include "secdyn/precise.hpp"
#include "secdyn/render.hpp"
#include "secdyn/verify.hpp"
