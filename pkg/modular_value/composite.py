"""Modular values of sums over subsystems and the sum/product rule diagnostics."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .config import DEFAULT_TOLERANCES
from .exceptions import SiteError
from .tensor import HilbertShape, Operator, SiteObservable, embed, matmul, tensor_ops
from .values import PrePostEnsemble, as_coupling, complex_to_dict, exp_spectral, \
    modular_value, two_level_coeffs, two_level_operator, weak_value

_logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ObservableSum:
    """Sum of site observables on pairwise-distinct sites of a common shape.

    Distinct sites make the terms commute by construction.
    """
    terms: Tuple[SiteObservable, ...]
    shape: HilbertShape

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError('An observable sum needs at least one term.')
        sites = [term.site for term in terms]
        if len(set(sites)) != len(sites):
            raise SiteError(f'Terms of a sum must act on distinct sites. Got {sites}.')
        for term in terms:
            embed(term, self.shape)  # validates site range and factor dimension
        object.__setattr__(self, 'terms', terms)

    @property
    def is_two_level(self) -> bool:
        return all(term.eigenvalues is not None for term in self.terms)

    def operator(self) -> Operator:
        """The summed observable as one operator on the full shape."""
        total = sum(embed(term, self.shape).matrix for term in self.terms)
        return Operator(self.shape, total, hermitian=True)


@dataclass(frozen=True)
class TermValues:
    site: int
    label: str
    weak: complex
    modular: complex

    def to_dict(self) -> Dict:
        return {
            'site': self.site, 'label': self.label,
            'weak': complex_to_dict(self.weak),
            'modular': complex_to_dict(self.modular)
        }


@dataclass(frozen=True)
class SumRuleReport:
    """Modular value of a sum against the sum of modular values.

    gap = mod_of_sum - sum_of_mods, reported signed.
    """
    mod_of_sum: complex
    sum_of_mods: complex
    gap: complex
    per_term: Tuple[TermValues, ...]
    g: float

    def sum_rule_holds(self, tol: float = 1e-9) -> bool:
        return abs(self.gap) <= tol

    def to_dict(self) -> Dict:
        return {
            'type': 'SumRuleReport',
            'g': self.g,
            'mod_of_sum': complex_to_dict(self.mod_of_sum),
            'sum_of_mods': complex_to_dict(self.sum_of_mods),
            'gap': complex_to_dict(self.gap),
            'per_term': [term.to_dict() for term in self.per_term]
        }


@dataclass(frozen=True)
class ProductRuleReport:
    """Weak value of a product against the product of weak values."""
    joint_weak: complex
    product_of_weaks: complex
    gap: complex
    weak_a: complex
    weak_b: complex

    def to_dict(self) -> Dict:
        return {
            'type': 'ProductRuleReport',
            'joint_weak': complex_to_dict(self.joint_weak),
            'product_of_weaks': complex_to_dict(self.product_of_weaks),
            'gap': complex_to_dict(self.gap),
            'weak_a': complex_to_dict(self.weak_a),
            'weak_b': complex_to_dict(self.weak_b)
        }


@dataclass(frozen=True)
class ProductSumReport:
    """Evaluation of the product-rule to sum-rule chain for two site observables.

    The four-term expansion aa'<AB>_w + ab'<A>_w + a'b<B>_w + bb' always equals
    (A+B)_mod. When the product-rule gap is below ``threshold`` the chain also
    factorizes into (A)_mod (B)_mod; otherwise the implication is vacuous.
    """
    mod_of_sum: complex
    expansion: complex
    mod_a: complex
    mod_b: complex
    product_rule: ProductRuleReport
    threshold: float
    g: float
    expansion_residual: float = field(init=False)
    factorization_residual: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, 'expansion_residual', abs(self.mod_of_sum - self.expansion))
        object.__setattr__(
            self, 'factorization_residual',
            abs(self.mod_of_sum - self.mod_a * self.mod_b))

    @property
    def premise_holds(self) -> bool:
        return abs(self.product_rule.gap) <= self.threshold

    @property
    def vacuous(self) -> bool:
        return not self.premise_holds

    @property
    def holds(self) -> bool:
        scale = max(1.0, abs(self.mod_of_sum))
        if self.expansion_residual > 1e-9 * scale:
            return False
        return self.vacuous or self.factorization_residual <= 1e-9 * scale

    def sum_rule_side_condition(self, tol: float = 1e-9) -> bool:
        """(A)_mod (B)_mod = (A)_mod + (B)_mod, under which the sum rule is restored."""
        return abs(self.mod_a * self.mod_b - (self.mod_a + self.mod_b)) <= tol

    def to_dict(self) -> Dict:
        return {
            'type': 'ProductSumReport',
            'g': self.g,
            'threshold': self.threshold,
            'mod_of_sum': complex_to_dict(self.mod_of_sum),
            'expansion': complex_to_dict(self.expansion),
            'mod_a': complex_to_dict(self.mod_a),
            'mod_b': complex_to_dict(self.mod_b),
            'product_rule': self.product_rule.to_dict(),
            'premise_holds': self.premise_holds,
            'holds': self.holds,
            'expansion_residual': self.expansion_residual,
            'factorization_residual': self.factorization_residual
        }


def _exp_of_sum(s: ObservableSum, g: float) -> Operator:
    # exp(-ig sum_j A_j) = kron_j exp(-ig A_j); identity on factors without a term
    by_site = {term.site: term for term in s.terms}
    parts = []
    for site, dim in enumerate(s.shape.dims):
        term = by_site.get(site)
        parts.append(
            exp_spectral(term.local, g) if term is not None
            else Operator.identity((dim,))
        )
    return tensor_ops(parts)


def _closed_form_of_sum(
    s: ObservableSum, g: float, eps_degen: Optional[float] = None,
    eigen_tol: Optional[float] = None
) -> Operator:
    # prod_j (a_j A_j + b_j I), in site order
    if not s.is_two_level:
        raise ValueError('The closed form needs the eigenvalue pair of every term.')
    product = Operator.identity(s.shape.dims)
    for term in sorted(s.terms, key=lambda t: t.site):
        coeffs = two_level_coeffs(*term.eigenvalues, g, eps_degen=eps_degen)
        embedded = embed(term, s.shape)
        product = matmul(
            product, two_level_operator(embedded, coeffs, eigen_tol=eigen_tol))
    return product


def modular_of_sum(
    s: ObservableSum, c, ensemble: PrePostEnsemble, method: str = 'exponential',
    eps_degen: Optional[float] = None, eigen_tol: Optional[float] = None
) -> complex:
    """(sum_j A_j)_mod.

    Args:
        s: Sum of site observables.
        c: Coupling constant (CouplingSpec or float).
        ensemble: Pre/post-selected ensemble on ``s.shape``.
        method: ``exponential`` (Kronecker product of factor exponentials),
            ``closed_form`` (product of a_j A_j + b_j I) or ``direct``
            (spectral exponential of the summed operator).
        eps_degen: Degeneracy tolerance override for ``closed_form``.
        eigen_tol: Spectrum check tolerance override for ``closed_form``.
    """
    s.shape.check_same(ensemble.shape, 'observable sum and ensemble')
    g = as_coupling(c).g
    if method == 'exponential':
        unitary = _exp_of_sum(s, g)
    elif method == 'closed_form':
        unitary = _closed_form_of_sum(s, g, eps_degen, eigen_tol)
    elif method == 'direct':
        unitary = exp_spectral(s.operator(), g)
    else:
        raise ValueError(f'Unknown evaluation method: {method}.')
    return ensemble.sandwich(unitary) / ensemble.overlap


def sum_rule_report(s: ObservableSum, c, ensemble: PrePostEnsemble) -> SumRuleReport:
    g = as_coupling(c).g
    per_term = []
    for term in s.terms:
        embedded = embed(term, s.shape)
        per_term.append(
            TermValues(
                term.site, term.name, weak_value(embedded, ensemble),
                modular_value(embedded, term.eigenvalues, g, ensemble)
            )
        )
    mod_of_sum = modular_of_sum(s, g, ensemble)
    sum_of_mods = sum((term.modular for term in per_term), 0j)
    _logger.debug('Sum rule at g=%s: mod of sum %s, sum of mods %s.',
                  g, mod_of_sum, sum_of_mods)
    return SumRuleReport(
        mod_of_sum, sum_of_mods, mod_of_sum - sum_of_mods, tuple(per_term), g)


def _check_distinct(a: SiteObservable, b: SiteObservable):
    if a.site == b.site:
        raise SiteError(f'Both observables act on site {a.site}.')


def weak_joint(
    a: SiteObservable, b: SiteObservable, ensemble: PrePostEnsemble
) -> complex:
    """Weak value of the product of two commuting site observables."""
    _check_distinct(a, b)
    product = matmul(embed(a, ensemble.shape), embed(b, ensemble.shape))
    return weak_value(product, ensemble)


def product_rule_report(
    a: SiteObservable, b: SiteObservable, ensemble: PrePostEnsemble
) -> ProductRuleReport:
    joint = weak_joint(a, b, ensemble)
    weak_a = weak_value(embed(a, ensemble.shape), ensemble)
    weak_b = weak_value(embed(b, ensemble.shape), ensemble)
    product = weak_a * weak_b
    return ProductRuleReport(joint, product, joint - product, weak_a, weak_b)


def check_product_implies_sum(
    a: SiteObservable, b: SiteObservable, c, ensemble: PrePostEnsemble,
    product_rule_tol: Optional[float] = None, eps_degen: Optional[float] = None
) -> ProductSumReport:
    """Evaluate (A+B)_mod through the four-term expansion and its factorization."""
    threshold = DEFAULT_TOLERANCES.product_rule_tol if product_rule_tol is None \
        else product_rule_tol
    if a.eigenvalues is None or b.eigenvalues is None:
        raise ValueError('Both observables need their eigenvalue pair.')
    g = as_coupling(c).g
    product_rule = product_rule_report(a, b, ensemble)
    coeffs_a = two_level_coeffs(*a.eigenvalues, g, eps_degen=eps_degen)
    coeffs_b = two_level_coeffs(*b.eigenvalues, g, eps_degen=eps_degen)
    expansion = coeffs_a.a * coeffs_b.a * product_rule.joint_weak \
        + coeffs_a.a * coeffs_b.b * product_rule.weak_a \
        + coeffs_b.a * coeffs_a.b * product_rule.weak_b \
        + coeffs_a.b * coeffs_b.b
    mod_of_sum = modular_of_sum(ObservableSum((a, b), ensemble.shape), g, ensemble)
    mod_a = coeffs_a.modular(product_rule.weak_a)
    mod_b = coeffs_b.modular(product_rule.weak_b)
    return ProductSumReport(
        mod_of_sum, expansion, mod_a, mod_b, product_rule, threshold, g)


def spin_pair_expansion(w1: complex, w2: complex, w12: complex, g: float) -> complex:
    """(s1 + s2)_mod for two spin components from their weak values.

    cos^2 g - (i/2) sin 2g (w1 + w2) - sin^2 g w12
    """
    return math.cos(g) ** 2 - 0.5j * math.sin(2 * g) * (w1 + w2) \
        - math.sin(g) ** 2 * w12
