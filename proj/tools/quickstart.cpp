// Minimal library walk-through: sign two vectors, estimate J, and compare
// the empirical spread with the exact variances of the three schemes.

#include <iostream>

#include "cminhash/cminhash.hpp"

int main() {
  using namespace cminhash;
  const index_t D = 256, K = 64;
  const auto [v, w] = synth_pair({D, 80, 30, Pattern::UniformRandom}, 0x1234);
  const PairSummary s = summarize_pair(v, w);
  std::cout << "J = " << s.jaccard() << " (f = " << s.union_size << ", a = " << s.intersection << ")\n";

  for (Scheme scheme : {Scheme::MinHash, Scheme::CMinHash0Pi, Scheme::CMinHashSigmaPi}) {
    const Sketcher sk(scheme, D, K, 0x5eed);
    const double est = estimate_jaccard(sk.sign(v), sk.sign(w));
    const McMoments mc = mc_moments(scheme, v, w, K, 2000, 0x5eed);
    double theory = 0.0;
    switch (scheme) {
      case Scheme::MinHash: theory = variance_mh(s.jaccard(), K); break;
      case Scheme::CMinHash0Pi: theory = variance_0pi(location_vector(v, w), K).variance; break;
      case Scheme::CMinHashSigmaPi: theory = variance_sigma_pi(D, s.union_size, s.intersection, K).variance; break;
    }
    std::cout << scheme_name(scheme) << ": estimate " << est << ", MC variance " << mc.variance
              << ", exact variance " << theory << '\n';
  }
}
