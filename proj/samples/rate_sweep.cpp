// Sweeps the blocklength for each protocol on a binary erasure source and
// prints measured rates next to the cycle-free region's forward threshold.

#include "zesc/zesc.hpp"

#include <cstdio>

int main() {
  const auto pmf = zesc::binary_erasure(zesc::Rational(3, 10));
  const auto region = zesc::cycle_free_region(pmf);
  std::printf("H(X|Y) = %.4f\n", *region.threshold(zesc::ConstraintKind::RX));
  std::printf("%-3s %4s %8s %8s %8s\n", "id", "n", "mean_RX", "mean_RY", "P_n");
  for (auto id : {zesc::ProtocolId::A, zesc::ProtocolId::B, zesc::ProtocolId::C})
    for (std::size_t n : {8, 12, 16}) {
      auto r = zesc::monte_carlo_rates(id, pmf, n, 0.5, 0.1, 500, 42);
      std::printf("%-3s %4zu %8.4f %8.4f %8.4f\n", zesc::to_string(id), n, r.mean_rx, r.mean_ry,
                  r.success_fraction);
    }
}
