// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cilgauge::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsage = 2,
  kThresholdBreach = 3,
};

// Runs `cilgauge <args...>`; args excludes the program name. Color is used
// only when `out_is_terminal` and CILGAUGE_NO_COLOR is unset.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, bool out_is_terminal = false);

}  // namespace cilgauge::cli
