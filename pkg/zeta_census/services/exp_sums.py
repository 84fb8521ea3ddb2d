"""
Direct evaluation of the two lattice exponential sums over pairs m < n < P0,
P0 = sqrt(T/2pi), and the Gram points g_nu(tau) of [T, T+U]:

    difference: sum (mn)^(-1/2) sum_nu cos(g ln(n/m) + phi1),
                phi1 = k w ln(P0/m) - l w ln(P0/n)
    product:    Re{ e^(-i tau) sum (mn)^(-1/2) sum_nu (-1)^nu e^(i(g ln(mn) + phi2)) },
                phi2 = -k w ln(P0/n) - l w ln(P0/m)

with w = omega(T). Terms are formed in float64 tensors and added with math.fsum.
"""
import logging
import math

import torch

from ..exceptions import ValidationError
from .gram_points import gram_points, index_range, omega
from .reports import ExpSumReport
from .theta_core import TWO_PI

logger = logging.getLogger(__name__)

# Cost grows like P0^2 * N1; beyond this height the double sum is refused
MAX_HEIGHT = 1e5


def _pairs(P0):
    n_max = math.ceil(P0) - 1
    return [(m, n) for n in range(2, n_max + 1) for m in range(1, n)]


def _setup(T, U, tau):
    if T > MAX_HEIGHT:
        P0 = math.sqrt(T / TWO_PI)
        window = index_range(T, U, tau)
        cost = P0 * P0 * window.count / 2.0
        raise ValidationError(
            f"Exponential sums are limited to T <= {MAX_HEIGHT:g}; T={T:g} needs about "
            f"{cost:.3g} terms"
        )
    P0 = math.sqrt(T / TWO_PI)
    window = index_range(T, U, tau)
    points = gram_points(window.indices(), tau)
    return P0, _pairs(P0), points


def _tensors(pairs, points):
    m = torch.tensor([p[0] for p in pairs], dtype=torch.float64)
    n = torch.tensor([p[1] for p in pairs], dtype=torch.float64)
    g = torch.tensor([x.t for x in points], dtype=torch.float64)
    parity = torch.tensor([-1.0 if x.nu % 2 else 1.0 for x in points], dtype=torch.float64)
    return m, n, g, parity


def _difference(T, P0, pairs, points, k, l):
    if not pairs or not points:
        return 0.0
    m, n, g, _ = _tensors(pairs, points)
    w = omega(T)
    phi = k * w * torch.log(P0 / m) - l * w * torch.log(P0 / n)
    args = g[None, :] * torch.log(n / m)[:, None] + phi[:, None]
    terms = torch.cos(args) * torch.rsqrt(m * n)[:, None]
    return math.fsum(terms.flatten().tolist())


def _product(T, P0, pairs, points, tau, k, l):
    if not pairs or not points:
        return 0.0
    m, n, g, parity = _tensors(pairs, points)
    w = omega(T)
    phi = -k * w * torch.log(P0 / n) - l * w * torch.log(P0 / m)
    # Re{e^(-i tau) e^(i x)} = cos(x - tau)
    args = g[None, :] * torch.log(m * n)[:, None] + phi[:, None] - tau
    terms = torch.cos(args) * parity[None, :] * torch.rsqrt(m * n)[:, None]
    return math.fsum(terms.flatten().tolist())


def difference_sum(T, U, tau=0.0, k=0, l=0):
    P0, pairs, points = _setup(T, U, tau)
    return _difference(T, P0, pairs, points, k, l)


def product_sum(T, U, tau=0.0, k=0, l=0):
    P0, pairs, points = _setup(T, U, tau)
    return _product(T, P0, pairs, points, tau, k, l)


def exp_sums(T, U, tau=0.0, k=0, l=0, M=None, strict=False):
    """Both sums with their height normalisations; M defaults to max(k, l, 1)."""
    overrides = {} if M is None else {'M': M}
    M = max(k, l, 1) if M is None else M
    P0, pairs, points = _setup(T, U, tau)
    logger.info(f"Exponential sums T={T:g} U={U:g} tau={tau:g} (k, l)=({k}, {l}): "
                f"{len(pairs)} pairs x {len(points)} Gram points")
    return ExpSumReport(
        command='exp_sums', T=T, U=U, tau=tau, k=k, l=l, M=M,
        pairs=len(pairs), gram_points=len(points),
        S1=_difference(T, P0, pairs, points, k, l),
        S2=_product(T, P0, pairs, points, tau, k, l),
        strict=strict, overrides=overrides,
    )
