#pragma once

#include "siglik/special.hpp"
#include "siglik/dist.hpp"
#include "siglik/signed_loglik.hpp"
#include "siglik/table.hpp"
#include "siglik/verify.hpp"
#include "siglik/qq.hpp"
