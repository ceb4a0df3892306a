// Probability that the Airy process stays below 0 at time 0 and below 0.5 at
// time 1, in both representations.

#include <cstdio>

#include "gapdet/gap.hpp"

int main() {
  using namespace gapdet;
  const GapProblem pb = GapProblem::make(Process::airy, {0.0, 1.0}, {{0.0}, {0.5}});
  const DetResult phys = determinant(pb, Representation::physical);
  const DetResult iiks = determinant(pb, Representation::iiks);
  std::printf("physical %.15f\n", phys.value.real());
  std::printf("iiks     %.15f\n", iiks.value.real());
  std::printf("|diff|   %.3e\n", std::abs(phys.value - iiks.value));
}
