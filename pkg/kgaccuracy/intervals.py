# -*- coding: utf-8 -*-
"""kgaccuracy.intervals

Wald and Wilson confidence intervals, equal-tailed (ET) and highest
posterior density (HPD) credible intervals for the accuracy of a knowledge
graph.

Copyright 2024-2025 by the kgaccuracy developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

The full text of the GNU General Public License is available at:
<http://www.gnu.org/licenses/gpl-3.0.txt>.
"""

import math
import sys
from collections import namedtuple
from functools import lru_cache

from .errors import DomainError, require
from .special import (BetaParams, beta_cdf, beta_pdf, beta_quantile,
                      normal_quantile)

WALD = 'wald'
WILSON = 'wilson'
ET = 'et'
HPD = 'hpd'
METHODS = (WALD, WILSON, ET, HPD)
CREDIBLE_METHODS = (ET, HPD)

HPD_TOLERANCE = 1e-11
HPD_MAX_ITERATIONS = 100
CONVERGED_COVERAGE = 1e-9
LOG_TINY = math.log(sys.float_info.min)
HPD_CACHE_SIZE = 1 << 16


class IntervalEstimate(namedtuple('IntervalEstimate',
                                  ['lower', 'upper', 'method', 'prior',
                                   'posterior'])):
    """A 1 - alpha interval [lower, upper] for the accuracy.

    Keyword arguments:
    lower -- lower bound l in [0, 1]
    upper -- upper bound u in [l, 1]
    method -- 'wald', 'wilson', 'et' or 'hpd'
    prior -- BetaParams the credible interval started from, if any
    posterior -- BetaParams the credible interval was built on, if any
    """
    __slots__ = ()

    def __new__(cls, lower, upper, method, prior=None, posterior=None):
        lower = float(lower)
        upper = float(upper)
        require(0.0 <= lower <= upper <= 1.0,
                'interval bounds must satisfy 0 <= l <= u <= 1, got '
                '(%r, %r)' % (lower, upper))
        require(method in METHODS, 'unknown interval method %r' % (method,))
        return super(IntervalEstimate, cls).__new__(cls, lower, upper, method,
                                                    prior, posterior)

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def moe(self):
        """Margin of error, half the width of the interval."""
        return (self.upper - self.lower) / 2.0


def _check_alpha(alpha):
    require(0.0 < alpha < 1.0, 'alpha must lie in (0, 1), got %r' % (alpha,))


def critical_value(alpha):
    """Return z_{alpha/2}, the two-sided standard normal critical value."""
    _check_alpha(alpha)
    return normal_quantile(1.0 - alpha / 2.0)


def wald(estimate, alpha):
    """Return the Wald interval mu_hat +/- z sqrt(V(mu_hat)).

    Bounds are truncated to [0, 1] after construction. A zero variance gives
    a zero-width interval.
    """
    z = critical_value(alpha)
    half_width = z * math.sqrt(max(estimate.variance, 0.0))
    lower = max(0.0, estimate.mu_hat - half_width)
    upper = min(1.0, estimate.mu_hat + half_width)
    return IntervalEstimate(lower, upper, WALD)


def wilson(mu_hat, n_eff, alpha):
    """Return the Wilson score interval.

    Keyword arguments:
    mu_hat -- estimated accuracy in [0, 1]
    n_eff -- sample size, design-effect adjusted under cluster sampling
    alpha -- significance level
    """
    require(n_eff > 0.0, 'Wilson interval needs n_eff > 0, got %r' % (n_eff,))
    require(0.0 <= mu_hat <= 1.0, 'mu_hat must lie in [0, 1]')
    z = critical_value(alpha)
    z2 = z * z
    denominator = 1.0 + z2 / n_eff
    center = (mu_hat + z2 / (2.0 * n_eff)) / denominator
    half_width = (z / denominator) * math.sqrt(
        mu_hat * (1.0 - mu_hat) / n_eff + z2 / (4.0 * n_eff * n_eff))
    lower = 0.0 if mu_hat == 0.0 else max(0.0, center - half_width)
    upper = 1.0 if mu_hat == 1.0 else min(1.0, center + half_width)
    return IntervalEstimate(lower, upper, WILSON)


def posterior_update(prior, tau, n):
    """Return the conjugate posterior Beta(a + tau, b + n - tau).

    tau and n may be real-valued effective counts.
    """
    if not 0.0 <= tau <= n:
        raise DomainError('posterior update needs 0 <= tau <= n, got '
                          'tau=%r, n=%r' % (tau, n))
    return BetaParams(prior.a + tau, prior.b + (n - tau))


def _et_bounds(posterior, alpha):
    return (beta_quantile(alpha / 2.0, posterior),
            beta_quantile(1.0 - alpha / 2.0, posterior))


def et_cri(posterior, alpha, prior=None):
    """Return the equal-tailed credible interval leaving alpha/2 of
    posterior mass in each tail.
    """
    _check_alpha(alpha)
    lower, upper = _et_bounds(posterior, alpha)
    return IntervalEstimate(lower, upper, ET, prior, posterior)


def _log_kernel(x, a, b):
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x)


def _slope(x, a, b):
    """Derivative of the log kernel."""
    return (a - 1.0) / x - (b - 1.0) / (1.0 - x)


def _matching_upper(level, a, b, mode, start):
    """Return u in (mode, 1) where the log kernel equals level.

    The log kernel is concave, so Newton steps approach the root from the
    right once they are past it; steps leaving the bracket are bisected.
    """
    lo, hi = mode, 1.0
    u = start
    if start is None or not mode < start < 1.0:
        u = 0.5 * (mode + 1.0)
    tolerance = HPD_TOLERANCE * max(1.0, abs(level))
    for _ in range(HPD_MAX_ITERATIONS):
        diff = _log_kernel(u, a, b) - level
        if abs(diff) <= tolerance:
            return u
        if diff > 0.0:
            lo = u
        else:
            hi = u
        slope = _slope(u, a, b)
        u_next = u - diff / slope if slope < 0.0 else None
        if u_next is None or not lo < u_next < hi:
            u_next = 0.5 * (lo + hi)
        if u_next == u or u_next >= 1.0:
            return u
        u = u_next
    return u


def _interior_hpd(posterior, alpha):
    """Shortest interval of a unimodal posterior with both shapes above one.

    The interval is parameterized by its lower bound l in (0, mode): u(l) is
    the point past the mode with f(u) = f(l), and ln l is moved by Newton
    steps until F(u) - F(l) = 1 - alpha. Both ends then share one density
    level, which characterizes the highest density interval. Working on
    ln l keeps the iteration fast when a is barely above one and l is
    vanishingly small.

    Returns None when the coverage equation cannot be met above the
    smallest positive double.
    """
    a, b = posterior
    coverage = 1.0 - alpha
    mode = (a - 1.0) / (a + b - 2.0)
    lower = posterior.mean - critical_value(alpha) * math.sqrt(
        posterior.variance)
    if not 0.0 < lower < mode:
        lower = 0.5 * mode
    log_lower = math.log(lower)
    lo, hi = LOG_TINY, math.log(mode)
    upper = None
    diff = float('inf')
    for _ in range(HPD_MAX_ITERATIONS):
        lower = math.exp(log_lower)
        upper = _matching_upper(_log_kernel(lower, a, b), a, b, mode, upper)
        diff = (beta_cdf(upper, posterior) - beta_cdf(lower, posterior) -
                coverage)
        if abs(diff) <= HPD_TOLERANCE:
            return lower, upper
        if diff > 0.0:
            lo = log_lower
        else:
            hi = log_lower
        # d/d(ln l) [F(u) - F(l)] with u'(l) = g'(l) / g'(u), f(u) = f(l)
        derivative = lower * beta_pdf(lower, posterior) * (
            _slope(lower, a, b) / _slope(upper, a, b) - 1.0)
        log_next = None
        if derivative < 0.0:
            candidate = log_lower - diff / derivative
            if lo < candidate < hi:
                log_next = candidate
        if log_next is None:
            log_next = 0.5 * (lo + hi)
        if log_next == log_lower:
            break
        log_lower = log_next
    if abs(diff) <= CONVERGED_COVERAGE:
        return lower, upper
    return None


def _one_sided_bounds(posterior, alpha):
    """The shorter of [0, Q(1 - alpha)] and [Q(alpha), 1]."""
    left = (0.0, beta_quantile(1.0 - alpha, posterior))
    right = (beta_quantile(alpha, posterior), 1.0)
    if left[1] - left[0] <= right[1] - right[0]:
        return left
    return right


@lru_cache(maxsize=HPD_CACHE_SIZE)
def _hpd_bounds(a, b, alpha):
    posterior = BetaParams(a, b)
    if a == b >= 1.0:
        # symmetric unimodal, or flat where every interval of mass
        # 1 - alpha is optimal
        return _et_bounds(posterior, alpha)
    if a >= 1.0 >= b:
        # increasing density
        return beta_quantile(alpha, posterior), 1.0
    if a <= 1.0 <= b:
        # decreasing density
        return 0.0, beta_quantile(1.0 - alpha, posterior)
    if a < 1.0 and b < 1.0:
        # U-shaped: the shortest single interval hugs one endpoint
        return _one_sided_bounds(posterior, alpha)
    # solve with the end closer to its boundary on the left
    if a <= b:
        bounds = _interior_hpd(posterior, alpha)
    else:
        bounds = _interior_hpd(BetaParams(b, a), alpha)
        if bounds is not None:
            bounds = (1.0 - bounds[1], 1.0 - bounds[0])
    if bounds is None:
        # a shape so close to one that the density is monotone in doubles
        return _one_sided_bounds(posterior, alpha)
    return bounds


def hpd_cri(posterior, alpha, prior=None):
    """Return the highest posterior density credible interval.

    Monotone posteriors get the closed forms [Q(alpha), 1] (increasing) and
    [0, Q(1 - alpha)] (decreasing); unimodal ones the width-minimizing
    interval of mass 1 - alpha.

    Keyword arguments:
    posterior -- BetaParams
    alpha -- significance level
    prior -- the prior the posterior came from, recorded on the result
    """
    _check_alpha(alpha)
    lower, upper = _hpd_bounds(posterior.a, posterior.b, float(alpha))
    return IntervalEstimate(lower, upper, HPD, prior, posterior)


def credible_interval(method, posterior, alpha, prior=None):
    """Dispatch to et_cri or hpd_cri."""
    if method == ET:
        return et_cri(posterior, alpha, prior)
    if method == HPD:
        return hpd_cri(posterior, alpha, prior)
    raise DomainError('not a credible interval method: %r' % (method,))


def build_interval(method, estimate, alpha, prior=None):
    """Build a 1 - alpha interval of the given method from an estimate.

    Keyword arguments:
    method -- one of METHODS
    estimate -- sampling.EstimateWithVariance
    alpha -- significance level
    prior -- BetaParams, required by the credible methods
    """
    if method == WALD:
        return wald(estimate, alpha)
    if method == WILSON:
        return wilson(estimate.mu_hat, estimate.effective_n, alpha)
    require(prior is not None, '%s intervals need a prior' % (method,))
    posterior = posterior_update(prior, estimate.effective_tau,
                                 estimate.effective_n)
    return credible_interval(method, posterior, alpha, prior)
