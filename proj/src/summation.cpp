#include "bose/summation.hpp"

namespace bose {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  s.add(xs);
  return s.value();
}

}  // namespace bose
