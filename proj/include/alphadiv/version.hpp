#pragma once

#define ALPHADIV_VERSION "0.1.0"
