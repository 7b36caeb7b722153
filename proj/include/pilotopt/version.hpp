#pragma once

#define PILOTOPT_VERSION "0.1.0"
