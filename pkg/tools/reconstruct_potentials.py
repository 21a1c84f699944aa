"""Rebuild the shipped potential CSVs from their five-decimal approximations.

The tables below list (k_i, rho_i, sigma_i) rounded away from zero to five
decimals; the last row has k = infinity. Reconstruction:

1. each boundary becomes the simplest rational in (k - 1e-5, k] with
   denominator at most 10^4;
2. sigma is taken verbatim, rho_s = 0, and the other rho follow from
   rho_i = rho_{i+1} + 2 (sigma_{i+1} - sigma_i) / k_i;
3. if exact validation fails, sigma is moved to the nearest point (in L1)
   satisfying every validity constraint with a small safety margin, snapped to
   a 10^-7 grid, and validated again. The margin grows until it passes.

Step 3 needs cvxpy, which the library itself does not use.

    python tools/reconstruct_potentials.py
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from pathlib import Path

from indcount.potential import (
    PrePotential,
    d2_prime,
    degree_range,
    serialize_potential,
    validate,
)

OUT = Path(__file__).resolve().parents[1] / "src" / "indcount" / "data"

BIPARTITE=[
    ('4', '0.13168', '-0.13168'),
    ('4.18794', '0.13168', '-0.13168'),
    ('4.23794', '0.13168', '-0.13168'),
    ('4.28572', '0.1241', '-0.11562'),
    ('4.33572', '0.11588', '-0.098'),
    ('4.38572', '0.10882', '-0.0827'),
    ('4.43572', '0.10176', '-0.06721'),
    ('4.44445', '0.0957', '-0.05377'),
    ('4.49445', '0.0957', '-0.05377'),
    ('4.55', '0.08753', '-0.03542'),
    ('4.57143', '0.08317', '-0.0255'),
    ('4.62143', '0.08294', '-0.02496'),
    ('4.66667', '0.07306', '-0.00213'),
    ('4.71667', '0.07306', '-0.00213'),
    ('5.10639', '0.07214', '0.00004'),
    ('5.2174', '0.06856', '0.00919'),
    ('5.33334', '0.06528', '0.01774'),
    ('5.45455', '0.06226', '0.02578'),
    ('5.5', '0.05947', '0.03339'),
    ('5.55556', '0.05693', '0.0404'),
    ('5.625', '0.05458', '0.0469'),
    ('5.71429', '0.05242', '0.053'),
    ('5.83334', '0.0504', '0.05877'),
    ('6', '0.0485', '0.06431'),
    ('6.08696', '0.03667', '0.09978'),
    ('6.17648', '0.0354', '0.10365'),
    ('6.26866', '0.03421', '0.10734'),
    ('6.36364', '0.03308', '0.11089'),
    ('6.46154', '0.032', '0.11429'),
    ('6.5', '0.03099', '0.11757'),
    ('6.54546', '0.03003', '0.12068'),
    ('6.6', '0.02913', '0.12362'),
    ('6.66667', '0.02828', '0.12643'),
    ('6.76057', '0.02747', '0.12913'),
    ('6.85715', '0.0267', '0.13174'),
    ('7', '0.02596', '0.13428'),
    ('7.07369', '0.01826', '0.16123'),
    ('7.14894', '0.01779', '0.16288'),
    ('7.22581', '0.01735', '0.16448'),
    ('7.30435', '0.01692', '0.16604'),
    ('7.38462', '0.0165', '0.16755'),
    ('7.46667', '0.0161', '0.16901'),
    ('7.5', '0.01572', '0.17044'),
    ('7.53847', '0.01536', '0.17181'),
    ('7.58334', '0.01501', '0.17314'),
    ('7.63637', '0.01467', '0.17441'),
    ('7.71429', '0.01435', '0.17565'),
    ('7.79382', '0.01403', '0.17685'),
    ('7.875', '0.01373', '0.17803'),
    ('8', '0.01344', '0.17918'),
    ('8.064', '0.00799', '0.20096'),
    ('8.12904', '0.00784', '0.20159'),
    ('8.19513', '0.00768', '0.20222'),
    ('8.2623', '0.00754', '0.20282'),
    ('8.33058', '0.00739', '0.20342'),
    ('8.4', '0.00725', '0.204'),
    ('8.47059', '0.00712', '0.20457'),
    ('8.5', '0.00698', '0.20513'),
    ('8.53334', '0.00686', '0.20567'),
    ('8.57143', '0.00673', '0.2062'),
    ('8.61539', '0.00661', '0.20671'),
    ('8.68218', '0.0065', '0.20721'),
    ('8.75', '0.00639', '0.20769'),
    ('8.8189', '0.00628', '0.20817'),
    ('8.88889', '0.00617', '0.20865'),
    ('9', '0.00607', '0.20911'),
    ('9.05661', '0.00199', '0.22746'),
    ('9.11393', '0.00195', '0.22761'),
    ('9.17198', '0.00192', '0.22774'),
    ('9.23077', '0.00189', '0.22788'),
    ('9.29033', '0.00187', '0.22801'),
    ('9.35065', '0.00184', '0.22815'),
    ('9.41177', '0.00181', '0.22828'),
    ('9.47369', '0.00178', '0.2284'),
    ('9.5', '0.00176', '0.22853'),
    ('9.52942', '0.00173', '0.22865'),
    ('9.5625', '0.00171', '0.22877'),
    ('9.6', '0.00168', '0.22889'),
    ('9.65854', '0.00166', '0.229'),
    ('9.7178', '0.00163', '0.22911'),
    ('9.77778', '0.00161', '0.22923'),
    ('9.83851', '0.00159', '0.22933'),
    ('9.9', '0.00157', '0.22944'),
    ('10', '0.00155', '0.22955'),
    (None, '0', '0.23725'),
]
GENERAL=[
    ('5.10639', '0.13168', '-0.13168'),
    ('5.33334', '0.11402', '-0.08658'),
    ('5.5', '0.10004', '-0.04931'),
    ('5.625', '0.08896', '-0.01883'),
    ('5.83334', '0.08006', '0.0062'),
    ('6', '0.07243', '0.02845'),
    ('6.08696', '0.04523', '0.11007'),
    ('6.26866', '0.04157', '0.12119'),
    ('6.46154', '0.03833', '0.13135'),
    ('6.54546', '0.03542', '0.14076'),
    ('6.66667', '0.0329', '0.14901'),
    ('6.85715', '0.03066', '0.15648'),
    ('7', '0.0286', '0.16354'),
    ('7.07369', '0.0105', '0.22689'),
    ('7.14894', '0.00994', '0.22886'),
    ('7.22581', '0.00994', '0.22886'),
    ('7.38462', '0.00942', '0.23075'),
    ('7.5', '0.00892', '0.23258'),
    ('7.58334', '0.00846', '0.2343'),
    ('7.63637', '0.00804', '0.2359'),
    ('7.71429', '0.00804', '0.2359'),
    ('7.875', '0.00764', '0.23743'),
    ('8', '0.00727', '0.23891'),
    (None, '0', '0.26796'),
]


def simplest_in(lo: Fraction, hi: Fraction, max_den: int = 10**4) -> Fraction:
    """Smallest-denominator rational in (lo, hi]."""
    for q in range(1, max_den + 1):
        p = math.floor(hi * q)
        if Fraction(p, q) > lo:
            return Fraction(p, q)
    raise ValueError(f"no rational with denominator <= {max_den} in ({lo}, {hi}]")


def rho_from_sigma(sigma, ks):
    rho = [Fraction(0)] * len(sigma)
    for i in range(len(sigma) - 2, -1, -1):
        rho[i] = rho[i + 1] + 2 * (sigma[i + 1] - sigma[i]) / ks[i]
    return rho


def build(sigma, ks, bipartite) -> PrePotential:
    return PrePotential(tuple(rho_from_sigma(sigma, ks)), tuple(sigma), tuple(ks), bipartite)


def nearest_valid_sigma(printed, ks, bipartite, margin):
    import cvxpy as cp
    import numpy as np

    s = len(printed)
    target = np.array([float(x) for x in printed])
    sig = cp.Variable(s)
    rho = [0] * s
    for i in range(s - 2, -1, -1):
        rho[i] = rho[i + 1] + 2 * (sig[i + 1] - sig[i]) / float(ks[i])
    cons = []
    for i in range(s - 1):
        cons += [rho[i] + sig[i] >= margin, rho[i] >= rho[i + 1], sig[i] <= sig[i + 1]]
    ln2 = math.log(2)
    shape = build(printed, ks, bipartite)
    for i in range(1, s + 1):
        d2p = float(d2_prime(shape.k(i - 1)))
        for d in degree_range(shape, i):
            r, sg = rho[i - 1], sig[i - 1]
            e_out = d * r + sg
            if not bipartite:
                e_in = math.ceil((d + d2p + 3) / 2) * r + (1 + d) * sg
            elif target[i - 1] >= 0:
                e_in = d2p * r + (1 + d) * sg
                cons.append(sg >= 0)
            else:
                e_in = d2p * r + math.floor((d + d2p - 1) / 2) * sg
                cons.append(sg <= 0)
            cons.append(cp.exp(-ln2 * e_out) + cp.exp(-ln2 * e_in) <= 1 - margin)
    cons.append(cp.exp(-ln2 * sig[-1]) + cp.exp(-12 * ln2 * sig[-1]) <= 1 - margin)
    cons.append(sig[-1] <= target[-1])
    cp.Problem(cp.Minimize(cp.norm1(sig - target)), cons).solve()
    return [Fraction(round(x * 10**7), 10**7) for x in sig.value]


def reconstruct(table, bipartite):
    step = Fraction(1, 10**5)
    ks = [simplest_in(Fraction(k) - step, Fraction(k)) for k, _, _ in table[:-1]]
    printed = [Fraction(s) for _, _, s in table]
    p = build(printed, ks, bipartite)
    if validate(p).passed:
        return p, []
    margin = 1e-9
    while margin < 1e-4:
        sigma = nearest_valid_sigma(printed, ks, bipartite, margin)
        p = build(sigma, ks, bipartite)
        if validate(p).passed:
            moved = [(i + 1, printed[i], sigma[i]) for i in range(len(sigma)) if sigma[i] != printed[i]]
            return p, moved
        margin *= 10
    raise RuntimeError("no valid perturbation found")


def main() -> int:
    for name, table, bipartite in (("general", GENERAL, False), ("bipartite", BIPARTITE, True)):
        p, moved = reconstruct(table, bipartite)
        (OUT / f"{name}.csv").write_text(serialize_potential(p))
        report = validate(p)
        print(f"{name}: {report.lines()[-1]}")
        for i, old, new in moved:
            print(f"  sigma_{i}: {float(old)} -> {new} ({float(new)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
