// Line-protocol objective: reads "x1 x2" per line, answers with camel3(x).
#include <iostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hei/bench.hpp"
#include "hei/trace_io.hpp"

int main() {
  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string a, b;
    if (!(in >> a >> b)) return 1;
    const Eigen::Vector2d x(hei::parse_double(a), hei::parse_double(b));
    std::cout << hei::format_double(hei::eval_camel3(x)) << std::endl;
  }
  return 0;
}
