#include "levyshe/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return levyshe::run_cli(argc, argv, std::cout, std::cerr);
}
