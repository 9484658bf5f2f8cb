#pragma once

#include "cli_flags.hpp"

namespace dll::cli {

// Exit codes: 0 ok, 1 usage, 2 I/O or format, 3 numerical abort,
// 4 partial sweep failure.
int cmd_gen_data(const FlagSet& flags);
int cmd_train(const FlagSet& flags);
int cmd_sample(const FlagSet& flags);
int cmd_eval(const FlagSet& flags);
int cmd_sweep(const FlagSet& flags);
int cmd_plot(const FlagSet& flags);

void print_usage();

}  // namespace dll::cli
