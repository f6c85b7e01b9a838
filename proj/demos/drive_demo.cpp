// Two plain stages from 2z^2 - 3: the cycles that became exact and the budget used.
#include <edyn/driver.hpp>

#include <iostream>

using namespace edyn;

int main()
{
    EntireMap base = EntireMap::polynomial(ExactPoly({GR(mpq_class(-3)), GR(0), GR(mpq_class(2))}));
    DriverOptions opt;
    opt.epsilon = 0.5;
    opt.stages = 2;
    DriveResult r = drive_plain(base, opt);
    if (r.error) {
        std::cerr << *r.error << "\n";
        return 1;
    }
    for (const auto& c : r.certificates) {
        std::cout << "stage " << c.stage << (c.ok() ? " verified" : " FAILED") << ", step " << c.step_upper
                  << " of " << c.step_limit << "\n";
        std::cout << cycles_csv(c.cycles);
    }
    std::cout << "final degree " << r.map.combined_exact().degree() << "\n";
}
