#pragma once

#include "antclust/ant.hpp"
#include "antclust/engine.hpp"
#include "antclust/errors.hpp"
#include "antclust/evaluation.hpp"
#include "antclust/random.hpp"
#include "antclust/rules.hpp"
#include "antclust/similarity.hpp"
