#ifndef STRUCTRTL_TESTS_ACCEPTANCE_CRITERIA_H_
#define STRUCTRTL_TESTS_ACCEPTANCE_CRITERIA_H_

#include <string>

namespace structrtl::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome GradientCorrectness();      // 1
Outcome FocalLossOracle();          // 2
Outcome StratifiedMaskProperties(); // 3
Outcome SpectralSuite();            // 4
Outcome MetricIdentities();         // 5
Outcome LongestPathBruteForce();    // 6
Outcome OverfitOracles();           // 7
Outcome PretrainingHelps();         // 8
Outcome DistillationHelps();        // 9
Outcome MuOneDegeneracy();          // 10
Outcome Determinism();              // 11
Outcome FrontendCorpus();           // 12

}  // namespace structrtl::acceptance

#endif  // STRUCTRTL_TESTS_ACCEPTANCE_CRITERIA_H_
