#ifndef ANGEMB_ANGEMB_HPP
#define ANGEMB_ANGEMB_HPP

#include "angemb/error.hpp"
#include "angemb/linalg.hpp"
#include "angemb/model.hpp"
#include "angemb/ae.hpp"
#include "angemb/tae.hpp"
#include "angemb/baselines.hpp"
#include "angemb/fit.hpp"
#include "angemb/synth.hpp"
#include "angemb/frames.hpp"
#include "angemb/imaging.hpp"
#include "angemb/io.hpp"

#endif  // ANGEMB_ANGEMB_HPP
