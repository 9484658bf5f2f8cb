#include <cstring>
#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
  using namespace dll;
  using namespace dll::cli;

  if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "help") == 0) {
    print_usage();
    return argc < 2 ? 1 : 0;
  }

  const std::string command = argv[1];
  try {
    const FlagSet flags(argc, argv, 2);
    if (command == "gen-data") return cmd_gen_data(flags);
    if (command == "train") return cmd_train(flags);
    if (command == "sample") return cmd_sample(flags);
    if (command == "eval") return cmd_eval(flags);
    if (command == "sweep") return cmd_sweep(flags);
    if (command == "plot") return cmd_plot(flags);
    std::cerr << "unknown command '" << command << "'\n";
    print_usage();
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const RangeError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const OrderingError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
