#pragma once

#include "mxkit/basis.hpp"
#include "mxkit/model.hpp"

namespace mxkit {

/// Exact <d1|H|d2> via the Slater-Condon rules for
/// H = sum t_pq c+_p c_q + 1/2 sum V_pqrs c+_p c+_q c_s c_r,
/// with V_pqrs = <pq|rs> in physicists' (12|12) index pairing. Determinants
/// differing in more than two orbitals give zero; line-up phases follow the
/// occupied-below bit counting convention.
double slater_condon(const Determinant& d1, const Determinant& d2, const IntegralSet& I);

/// <mu|H|nu> between excitation strings: Slater-Condon on the mapped
/// determinants times both canonical phases.
double h_element(const ExcitationString& mu, const ExcitationString& nu, const BasisSpec& spec,
                 const IntegralSet& I);

/// <mu|H|0>; vanishes for singles under the Brillouin condition and for
/// rank >= 3 because H is two-body.
double h_element_vacuum(const ExcitationString& mu, const BasisSpec& spec, const IntegralSet& I);

} // namespace mxkit
