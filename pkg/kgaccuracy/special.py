# -*- coding: utf-8 -*-
"""kgaccuracy.special

Beta, normal and Student t kernels used by the interval estimators.

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
from statistics import NormalDist

from .errors import ConvergenceError, DomainError, require

CF_TOLERANCE = 1e-15
CF_MAX_ITERATIONS = 20000
QUANTILE_TOLERANCE = 1e-14
QUANTILE_MAX_ITERATIONS = 1200
FPMIN = sys.float_info.min / sys.float_info.epsilon

_STANDARD_NORMAL = NormalDist()


class BetaParams(namedtuple('BetaParams', ['a', 'b'])):
    """Shape pair (a, b) of a beta distribution, used both as prior and as
    posterior of the accuracy of a knowledge graph.

    Keyword arguments:
    a -- pseudo-count of correct triples, a > 0
    b -- pseudo-count of incorrect triples, b > 0
    """
    __slots__ = ()

    def __new__(cls, a, b):
        a = float(a)
        b = float(b)
        require(a > 0.0 and b > 0.0 and math.isfinite(a) and
                math.isfinite(b),
                'beta shapes must be finite and positive, got (%r, %r)' %
                (a, b))
        return super(BetaParams, cls).__new__(cls, a, b)

    @property
    def mean(self):
        return self.a / (self.a + self.b)

    @property
    def variance(self):
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def __str__(self):
        return 'Beta(%g, %g)' % (self.a, self.b)


def _check_unit(x, name='x'):
    require(0.0 <= x <= 1.0, '%s must lie in [0, 1], got %r' % (name, x))


def log_gamma(x):
    """Return ln(Gamma(x)) for x > 0."""
    require(x > 0.0, 'log_gamma is defined for x > 0, got %r' % (x,))
    return math.lgamma(x)


def log_beta(a, b):
    """Return ln(B(a, b)), the log normalization constant of Beta(a, b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_pdf(x, p):
    """Return the Beta(p.a, p.b) density at x.

    At an endpoint the density is 0, finite, or float('inf') depending on
    whether the matching shape is above, equal to, or below one.

    Keyword arguments:
    x -- point in [0, 1]
    p -- BetaParams
    """
    _check_unit(x)
    a, b = p
    if x == 0.0 or x == 1.0:
        shape = a if x == 0.0 else b
        if shape < 1.0:
            return float('inf')
        if shape > 1.0:
            return 0.0
        return math.exp(-log_beta(a, b))
    log_density = ((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) -
                   log_beta(a, b))
    try:
        return math.exp(log_density)
    except OverflowError:
        return float('inf')


def _beta_continued_fraction(a, b, x):
    """Evaluate the continued fraction of the incomplete beta function by the
    modified Lentz method.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    result = d
    for m in range(1, CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        result *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        result *= delta
        if abs(delta - 1.0) < CF_TOLERANCE:
            return result
    raise ConvergenceError('incomplete beta continued fraction did not '
                           'converge for a=%r, b=%r, x=%r' % (a, b, x))


def beta_cdf(x, p):
    """Return the regularized incomplete beta function I_x(a, b).

    Keyword arguments:
    x -- point in [0, 1]
    p -- BetaParams
    """
    _check_unit(x)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    a, b = p
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        value = front * _beta_continued_fraction(a, b, x) / a
    else:
        value = 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, value))


def _log_lower_tail(x, a, b, lbeta):
    """Return ln I_x(a, b) for 0 < x < 1 without underflow in the tail."""
    log_front = a * math.log(x) + b * math.log1p(-x) - lbeta
    if x < (a + 1.0) / (a + b + 2.0):
        return log_front + math.log(_beta_continued_fraction(a, b, x) / a)
    upper = math.exp(log_front) * _beta_continued_fraction(b, a, 1.0 - x) / b
    return math.log1p(-min(upper, 1.0 - sys.float_info.epsilon))


def _quantile_guess(q, a, b, lbeta):
    """Starting point for the lower-tail Newton iteration, q <= 0.5."""
    if a >= 1.0 and b >= 1.0:
        # Cornish-Fisher style normal approximation of the lower tail
        t = math.sqrt(-2.0 * math.log(q))
        z = t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t))
        al = (z * z - 3.0) / 6.0
        h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0))
        w = (z * math.sqrt(max(al + h, 0.0)) / h -
             (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
             (al + 5.0 / 6.0 - 2.0 / (3.0 * h)))
        guess = a / (a + b * math.exp(min(2.0 * w, 700.0)))
    else:
        # power-law tails dominate when a shape is below one
        t = math.exp(a * math.log(a / (a + b))) / a
        u = math.exp(b * math.log(b / (a + b))) / b
        w = t + u
        if q < t / w:
            guess = math.exp((math.log(a * w) + math.log(q)) / a)
        else:
            guess = -math.expm1(math.log(b * w * (1.0 - q)) / b)
    if q < 1e-3:
        # I_x(a, b) ~ x^a / (a B(a, b)) as x -> 0
        tail = math.exp((math.log(q) + math.log(a) + lbeta) / a)
        if 0.0 < tail < 1.0:
            if not 0.0 < guess < 1.0:
                return tail
            log_q = math.log(q)
            if (abs(_log_lower_tail(tail, a, b, lbeta) - log_q) <
                    abs(_log_lower_tail(guess, a, b, lbeta) - log_q)):
                return tail
    return guess


def _lower_quantile(q, a, b):
    """Solve I_x(a, b) = q for 0 < q <= 0.5.

    Newton steps are taken on ln I_x, which keeps the relative error of the
    lower tail under control down to the smallest representable q; steps
    leaving the current bracket fall back to bisection.
    """
    lbeta = log_beta(a, b)
    log_q = math.log(q)
    tolerance = QUANTILE_TOLERANCE * max(1.0, -log_q)
    x = _quantile_guess(q, a, b, lbeta)
    if not 0.0 < x < 1.0:
        x = 0.5
    lo, hi = 0.0, 1.0
    best_x, best_err = x, float('inf')
    for _ in range(QUANTILE_MAX_ITERATIONS):
        log_tail = _log_lower_tail(x, a, b, lbeta)
        diff = log_tail - log_q
        if abs(diff) < best_err:
            best_x, best_err = x, abs(diff)
        if abs(diff) <= tolerance:
            return x
        if diff < 0.0:
            lo = x
        else:
            hi = x
        x_next = None
        log_density = ((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) -
                       lbeta)
        log_ratio = log_tail - log_density
        if log_ratio < 700.0:
            candidate = x - diff * math.exp(log_ratio)
            if lo < candidate < hi:
                x_next = candidate
        if x_next is None:
            x_next = 0.5 * (lo + hi)
        if (x_next <= lo or x_next >= hi or
                abs(x_next - x) <= sys.float_info.epsilon * x):
            # bracket collapsed to adjacent doubles
            return best_x
        x = x_next
    return best_x


def beta_quantile(q, p):
    """Return x such that beta_cdf(x, p) = q.

    The root is found on the lighter side of the median: q > 0.5 is
    answered through I_x(a, b) = 1 - I_{1-x}(b, a), so the relative error of
    the returned tail mass stays near machine precision in both tails.

    Keyword arguments:
    q -- probability in [0, 1]
    p -- BetaParams
    """
    _check_unit(q, 'q')
    if q == 0.0:
        return 0.0
    if q == 1.0:
        return 1.0
    a, b = p
    if b == 1.0:
        return q ** (1.0 / a)
    if a == 1.0:
        return -math.expm1(math.log1p(-q) / b)
    if q <= 0.5:
        return _lower_quantile(q, a, b)
    return 1.0 - _lower_quantile(1.0 - q, b, a)


def normal_quantile(q):
    """Return z with Phi(z) = q for the standard normal distribution."""
    require(0.0 < q < 1.0, 'normal_quantile is defined on (0, 1), got %r' %
            (q,))
    return _STANDARD_NORMAL.inv_cdf(q)


def student_t_sf(t, df):
    """Return P(T > t) for Student's t with df degrees of freedom.

    Keyword arguments:
    t -- the statistic
    df -- degrees of freedom, df > 0
    """
    require(df > 0.0, 'degrees of freedom must be positive, got %r' % (df,))
    if math.isnan(t):
        raise DomainError('t statistic is NaN')
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * beta_cdf(x, BetaParams(0.5 * df, 0.5))
    if t > 0.0:
        return tail
    return 1.0 - tail
