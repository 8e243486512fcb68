#include "mxkit/slater.hpp"

#include <cmath>
#include <stdexcept>

namespace mxkit {

namespace {

// (-1)^(number of occupied orbitals strictly between x and y in d)
int hop_phase(const Determinant& d, int x, int y) {
    const int lo = std::min(x, y);
    const int hi = std::max(x, y);
    int n = d.count_below(hi) - d.count_below(lo + 1);
    return (n % 2 == 0) ? 1 : -1;
}

} // namespace

double slater_condon(const Determinant& d1, const Determinant& d2, const IntegralSet& I) {
    if (d1.popcount() != d2.popcount())
        throw InvalidExcitation("slater_condon: particle numbers differ");

    const std::vector<int> only1 = d1.occupied_minus(d2); // ascending
    const std::vector<int> only2 = d2.occupied_minus(d1);
    const std::size_t ndiff = only1.size();

    if (ndiff > 2)
        return 0.0;

    if (ndiff == 0) {
        double e = 0.0;
        const std::vector<int> occ = d1.occupied_list();
        for (int p : occ)
            e += I.t(p, p);
        for (int p : occ)
            for (int q : occ)
                e += 0.5 * (I.V(p, q, p, q) - I.V(p, q, q, p));
        return e;
    }

    if (ndiff == 1) {
        const int i = only1[0];
        const int a = only2[0];
        double e = I.t(i, a);
        const std::vector<int> occ = d1.occupied_list();
        for (int p : occ) {
            if (p == i)
                continue;
            e += I.V(i, p, a, p) - I.V(i, p, p, a); // <ip|ap> - <ip|pa>
        }
        return hop_phase(d1, i, a) * e;
    }

    // two-orbital difference: <ij||ab> with a two-step line-up phase
    const int i = only1[0];
    const int j = only1[1];
    const int a = only2[0];
    const int b = only2[1];
    int phase = hop_phase(d1, i, a);
    Determinant mid = d1;
    mid.clear(i);
    mid.set(a);
    phase *= hop_phase(mid, j, b);
    return phase * (I.V(i, j, a, b) - I.V(i, j, b, a));
}

double h_element(const ExcitationString& mu, const ExcitationString& nu, const BasisSpec& spec,
                 const IntegralSet& I) {
    const auto [dmu, pmu] = to_determinant(mu, spec);
    const auto [dnu, pnu] = to_determinant(nu, spec);
    return pmu * pnu * slater_condon(dmu, dnu, I);
}

double h_element_vacuum(const ExcitationString& mu, const BasisSpec& spec, const IntegralSet& I) {
    if (mu.rank() > 2)
        return 0.0;
    const auto [dmu, pmu] = to_determinant(mu, spec);
    return pmu * slater_condon(dmu, Determinant::fermi_vacuum(spec), I);
}

} // namespace mxkit
