#pragma once

#include "quatkmp/errors.hpp"
#include "quatkmp/gmm.hpp"
#include "quatkmp/highdim.hpp"
#include "quatkmp/kmp.hpp"
#include "quatkmp/orient.hpp"
#include "quatkmp/quat.hpp"
#include "quatkmp/rng.hpp"
#include "quatkmp/types.hpp"
