#pragma once

#include "pxk/bounds.hpp"
#include "pxk/estimator.hpp"
#include "pxk/geometry.hpp"
#include "pxk/hybrid.hpp"
#include "pxk/kernel.hpp"
#include "pxk/matrix.hpp"
#include "pxk/proxy.hpp"
#include "pxk/rrqr.hpp"
