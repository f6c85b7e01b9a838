// 10 cosh - 12: inclusions, coded orbits up to period 4 and the multiplier test.
#include <edyn/quadlike.hpp>

#include <iostream>

using namespace edyn;

int main()
{
    PrecisionScope prec(128);
    InclusionReport inc = certify_f0_inclusions(4096);
    std::cout << "max |f0 + 2| on |z| = 1: " << inc.max_modulus << " (bound 7)\n";
    std::cout << "winding 2 targets: " << inc.inner.matched << "/100 and " << inc.outer.matched << "/100\n";
    EntireMap f = make_f0();
    std::cout << orbits_csv(enumerate_orbits(f, 4));
    ObstructionReport ob = affine_obstruction(f);
    std::cout << "lambda+ lambda- = " << ob.product << ", lambda2 = " << ob.data.two << ": " << to_string(ob.verdict)
              << "\n";
}
