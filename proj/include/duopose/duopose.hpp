#pragma once

#include "duopose/agent.hpp"
#include "duopose/depth_observer.hpp"
#include "duopose/errors.hpp"
#include "duopose/geometry.hpp"
#include "duopose/harness.hpp"
#include "duopose/message.hpp"
#include "duopose/presets.hpp"
#include "duopose/relpose_ekf.hpp"
#include "duopose/rng.hpp"
#include "duopose/scenario.hpp"
#include "duopose/simulator.hpp"
#include "duopose/transport.hpp"
