// Modulus of the left-to-right curve family of a 2 x 1 rectangle with
// boundary data f = x, checked against the closed forms
//   V = sqrt(ab) = sqrt(2),  eta*(Gamma) = sqrt(b) / sqrt(a) = 1 / sqrt(2).

#include <cmath>
#include <cstdio>

#include "pmod/duality.hpp"
#include "pmod/modulus.hpp"
#include "pmod/space.hpp"

int main() {
  using namespace pmod;
  const auto g = build_domain(DomainSpec::rectangle(2.0, 1.0, 1.0 / 8));
  const auto f = sample(g, [](double x, double) { return x; });
  const auto prob = ModulusProblem::endpoint(2.0, f);

  ModulusOptions opt;
  opt.tol = 1e-8;
  const auto cert = solve_modulus(g, prob, opt);
  std::printf("V = %.10f (sqrt 2 = %.10f)\n", cert.value, std::sqrt(2.0));
  std::printf("eta* mass = %.10f over %zu paths\n", total_mass(cert.eta), cert.eta.size());

  const auto rep = verify_certificate(g, prob, cert, 1e-7);
  for (const auto& c : rep.checks)
    std::printf("%-24s %s  residual %.3g\n", c.name.c_str(), c.pass ? "ok  " : "FAIL", c.residual);
  return rep.pass() ? 0 : 1;
}
