"""modular-value command line interface."""
import io
import json
import logging
import sys
from contextlib import contextmanager
from typing import Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

from .composite import ObservableSum, check_product_implies_sum, sum_rule_report
from .config import DEFAULT_TOLERANCES, RunConfig
from .exceptions import ConfigError, ModularValueError
from .expression import BasisDeclaration, ExpressionError, parse_ket, parse_operator
from .meter import MeterPrep, TwoQubitMeterPrep, crz_sweep, estimate_modular_from_shots, \
    modular_sweep, run_single_meter, run_two_qubit_meter, sample_meter, write_sweep_csv
from .scenarios import SCENARIOS, crz_ensemble, run_scenario
from .tensor import Operator, SiteObservable
from .values import PrePostEnsemble, complex_to_dict, modular_value, two_level_coeffs, \
    weak_value

_logger = logging.getLogger(__name__)

_LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']


@contextmanager
def _exit_codes():
    """Expression and usage problems exit 2, domain errors exit 1."""
    try:
        yield
    except ExpressionError as error:
        click.echo(error.format(), err=True)
        sys.exit(2)
    except ConfigError as error:
        click.echo(f'Error: {error}', err=True)
        sys.exit(2)
    except (ModularValueError, ValueError, KeyError) as error:
        _logger.debug('Command failed.', exc_info=True)
        click.echo(f'Error: {error}', err=True)
        sys.exit(1)


def _basis(specs: Sequence[str]) -> BasisDeclaration:
    return BasisDeclaration.from_strings(specs) if specs else BasisDeclaration()


def _ensemble(psi: str, phi: str, basis: BasisDeclaration) -> PrePostEnsemble:
    return PrePostEnsemble.create(parse_ket(psi, basis), parse_ket(phi, basis))


def _coupling(g: Optional[float], theta: Optional[float]) -> float:
    if g is not None and theta is not None:
        raise click.UsageError('Use either --g or --theta, not both.')
    if theta is not None:
        return theta / 2
    if g is None:
        raise click.UsageError('A coupling is required: pass --g or --theta.')
    return g


def _eigen_pair(op: Operator) -> Optional[Tuple[float, float]]:
    """Eigenvalue pair (larger first) of a non-degenerate two-level operator."""
    if op.side != 2:
        return None
    low, high = np.linalg.eigvalsh(op.matrix)
    if high - low <= DEFAULT_TOLERANCES.eps_degen:
        return None
    return float(high), float(low)


def _site_observable(spec: str, basis: BasisDeclaration) -> SiteObservable:
    site, sep, source = spec.partition(':')
    if not sep or not site.strip().isdigit():
        raise click.BadParameter(
            f'{spec!r} is not of the form SITE:EXPR.', param_hint='--obs')
    site = int(site)
    # a site observable spans one factor and reads that factor's labels
    local_basis = BasisDeclaration(basis.pairs[site:site + 1])
    local = parse_operator(source, local_basis)
    return SiteObservable(site, local, _eigen_pair(local), label=source.strip())


def _flatten(record: Dict, prefix: str = '') -> List[Tuple[str, float, float]]:
    """(quantity, re, im) rows of every complex value in a record."""
    rows = []
    for key in sorted(record):
        value = record[key]
        name = f'{prefix}{key}'
        if isinstance(value, dict) and set(value) == {'re', 'im'}:
            rows.append((name, value['re'], value['im']))
        elif isinstance(value, dict):
            rows.extend(_flatten(value, f'{name}.'))
    return rows


def _emit(record: Dict, config: RunConfig):
    if config.output_format == 'json':
        text = json.dumps(record, sort_keys=True, indent=2) + '\n'
    else:
        lines = ['quantity,re,im'] + [
            f'{name},{re!r},{im!r}' for name, re, im in _flatten(record)]
        text = '\n'.join(lines) + '\n'
    _write(text, config.output_path)


def _write(text: str, path: Optional[str]):
    if path is None:
        click.echo(text, nl=False)
        return
    with open(path, 'w', encoding='utf-8', newline='') as outf:
        outf.write(text)
    _logger.info('Wrote %s.', path)


_common_states = [
    click.option('--psi', required=True, help='Pre-selected ket expression.'),
    click.option('--phi', required=True, help='Post-selected ket expression.'),
    click.option(
        '--basis', multiple=True, help='Ket labels of one two-level factor, e.g. '
        '"H,V". Repeat once per factor; fixes the number of factors.')
]

_common_output = [
    click.option('--format', 'output_format', type=click.Choice(['json', 'csv']),
                 default=None, help='Output format.'),
    click.option('--out', 'output_path', type=click.Path(dir_okay=False),
                 default=None, help='Write to this file instead of standard output.')
]


def _options(options):
    def decorator(func):
        for option in reversed(options):
            func = option(func)
        return func
    return decorator


@click.group(help='Weak and modular values of pre/post-selected ensembles.')
@click.version_option(package_name='pollination-modular-value')
@click.option('--log-level', type=click.Choice(_LOG_LEVELS), default='WARNING',
              show_default=True, help='Logging level on standard error.')
def main(log_level):
    logging.basicConfig(
        level=getattr(logging, log_level), stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s')


@main.command('weak')
@_options(_common_states)
@click.option('--obs', required=True, help='Observable expression.')
@_options(_common_output)
def weak(psi, phi, basis, obs, output_format, output_path):
    """Weak value <phi|A|psi> / <phi|psi>."""
    with _exit_codes():
        config = RunConfig(output_format=output_format or 'json', output_path=output_path)
        declaration = _basis(basis)
        ensemble = _ensemble(psi, phi, declaration)
        op = parse_operator(obs, declaration)
        record = {
            'command': 'weak', 'observable': obs,
            'weak': complex_to_dict(weak_value(op, ensemble)),
            'overlap': complex_to_dict(ensemble.overlap)
        }
        _emit(record, config)


@main.command('modular')
@_options(_common_states)
@click.option('--obs', required=True, help='Observable expression.')
@click.option('--g', type=float, default=None, help='Coupling constant.')
@click.option('--theta', type=float, default=None, help='Gate angle; g = theta / 2.')
@click.option('--method', type=click.Choice(['spectral', 'lagrange', 'closed_form']),
              default='spectral', show_default=True, help='Exponential evaluation.')
@_options(_common_output)
def modular(psi, phi, basis, obs, g, theta, method, output_format, output_path):
    """Modular value <phi|exp(-i g A)|psi> / <phi|psi>."""
    with _exit_codes():
        g = _coupling(g, theta)
        config = RunConfig(
            values=[g], output_format=output_format or 'json', output_path=output_path)
        declaration = _basis(basis)
        ensemble = _ensemble(psi, phi, declaration)
        op = parse_operator(obs, declaration)
        eigs = _eigen_pair(op)
        record = {
            'command': 'modular', 'observable': obs, 'g': g, 'method': method,
            'modular': complex_to_dict(modular_value(op, eigs, g, ensemble, method)),
            'weak': complex_to_dict(weak_value(op, ensemble)),
            'overlap': complex_to_dict(ensemble.overlap)
        }
        if eigs is not None:
            record['coefficients'] = two_level_coeffs(*eigs, g).to_dict()
        _emit(record, config)


@main.command('sumrule')
@_options(_common_states)
@click.option('--obs', 'terms', multiple=True, required=True,
              help='Site observable as SITE:EXPR, e.g. 0:sx. Repeat per term.')
@click.option('--g', type=float, default=None, help='Coupling constant.')
@click.option('--theta', type=float, default=None, help='Gate angle; g = theta / 2.')
@_options(_common_output)
def sumrule(psi, phi, basis, terms, g, theta, output_format, output_path):
    """Modular value of a sum against the sum of modular values.

    With exactly two two-level terms the product-rule report and the
    product-to-sum expansion are added.
    """
    with _exit_codes():
        g = _coupling(g, theta)
        config = RunConfig(
            values=[g], output_format=output_format or 'json', output_path=output_path)
        declaration = _basis(basis)
        ensemble = _ensemble(psi, phi, declaration)
        observables = [_site_observable(spec, declaration) for spec in terms]
        report = sum_rule_report(ObservableSum(observables, ensemble.shape), g, ensemble)
        record = {'command': 'sumrule', 'sum_rule': report.to_dict()}
        if len(observables) == 2 and all(o.eigenvalues for o in observables):
            chain = check_product_implies_sum(*observables, g, ensemble)
            record['product_sum'] = chain.to_dict()
        _emit(record, config)


def _shot_records(outcome, shots: int, seed: int):
    # one seed per basis so the three histograms are independent
    return [sample_meter(outcome, basis, shots, seed + k) for k, basis in enumerate('XYZ')]


@main.command('meter')
@_options(_common_states)
@click.option('--obs', 'observables', multiple=True, required=True,
              help='Observable expression; two SITE:EXPR values run the two-qubit meter.')
@click.option('--g', type=float, default=None, help='Coupling constant.')
@click.option('--theta', type=float, default=None, help='Gate angle; g = theta / 2.')
@click.option('--gamma-bar', type=float, default=0.1, show_default=True,
              help='Amplitude of the interacting meter component.')
@click.option('--shots', type=int, default=0, show_default=True,
              help='Shots per tomography basis of the single-observable meter; '
              '0 reports the exact meter state only.')
@click.option('--seed', type=int, default=0, show_default=True, help='Sampling seed.')
@_options(_common_output)
def meter(psi, phi, basis, observables, g, theta, gamma_bar, shots, seed,
          output_format, output_path):
    """Simulate the meter qubit protocol and optionally its shot tomography."""
    with _exit_codes():
        g = _coupling(g, theta)
        config = RunConfig(
            values=[g], gamma_bar=gamma_bar, shots=shots or RunConfig.shots, seed=seed,
            output_format=output_format or 'json', output_path=output_path)
        declaration = _basis(basis)
        ensemble = _ensemble(psi, phi, declaration)
        record = {'command': 'meter', 'g': g}
        if len(observables) == 2:
            if shots > 0:
                raise click.UsageError(
                    '--shots applies to the single-observable meter only.')
            s_obs, p_obs = (_site_observable(spec, declaration) for spec in observables)
            prep = TwoQubitMeterPrep.from_gamma_bar(gamma_bar)
            outcome = run_two_qubit_meter(s_obs, p_obs, g, ensemble, prep)
        elif len(observables) == 1:
            op = parse_operator(observables[0], declaration)
            prep = MeterPrep.from_gamma_bar(gamma_bar)
            outcome = run_single_meter(op, g, ensemble, prep)
            record['exact'] = complex_to_dict(modular_value(op, None, g, ensemble))
            if shots > 0:
                records = _shot_records(outcome, shots, seed)
                record['shots'] = [r.to_dict() for r in records]
                record['estimate'] = estimate_modular_from_shots(records, prep).to_dict()
        else:
            raise click.UsageError('Pass one --obs, or two SITE:EXPR values.')
        record['outcome'] = outcome.to_dict()
        _emit(record, config)


@main.command('scenario')
@click.argument('name', type=click.Choice(sorted(SCENARIOS)))
@click.option('--g', type=float, default=None, help='Coupling constant.')
@click.option('--theta', type=float, default=None, help='Gate angle; g = theta / 2.')
@click.option('--gamma-bar', type=float, default=0.1, show_default=True,
              help='Amplitude of the interacting meter component.')
@_options(_common_output)
def scenario(name, g, theta, gamma_bar, output_format, output_path):
    """Report a preset scenario: epr, hardy, cheshire or crz."""
    with _exit_codes():
        g = _coupling(g, theta)
        config = RunConfig(
            values=[g], gamma_bar=gamma_bar, output_format=output_format or 'json',
            output_path=output_path)
        _emit(run_scenario(name, g, gamma_bar).to_dict(), config)


@main.command('sweep')
@click.argument('target', type=click.Choice(['crz', 'exprs']))
@click.option('--range', 'sweep_range', type=(float, float, int), required=True,
              help='START STOP COUNT. Gate angles for crz, couplings for exprs.')
@click.option('--psi', default=None, help='Pre-selected ket expression (exprs).')
@click.option('--phi', default=None, help='Post-selected ket expression (exprs).')
@click.option('--obs', default=None, help='Single-qubit observable expression (exprs).')
@click.option('--basis', multiple=True, help='Ket labels of one two-level factor.')
@click.option('--gamma-bar', type=float, default=0.1, show_default=True,
              help='Amplitude of the interacting meter component.')
@_options(_common_output)
def sweep(target, sweep_range, psi, phi, obs, basis, gamma_bar, output_format,
          output_path):
    """Meter-extracted modular values over a grid, one row per grid point.

    Every row reports the coupling g; for crz this is half the gate angle.
    """
    with _exit_codes():
        config = RunConfig(
            sweep=sweep_range, gamma_bar=gamma_bar,
            output_format=output_format or 'csv', output_path=output_path)
        prep = MeterPrep.from_gamma_bar(gamma_bar)
        if target == 'crz':
            rows = crz_sweep(crz_ensemble(), prep, config.grid)
        else:
            if psi is None or phi is None or obs is None:
                raise click.UsageError('The exprs sweep needs --psi, --phi and --obs.')
            declaration = _basis(basis)
            ensemble = _ensemble(psi, phi, declaration)
            rows = modular_sweep(
                parse_operator(obs, declaration), ensemble, prep, config.grid)
        if config.output_format == 'csv':
            stream = io.StringIO()
            write_sweep_csv(rows, stream)
            _write(stream.getvalue(), config.output_path)
        else:
            record = {'command': 'sweep', 'target': target, 'rows': [
                {'g': row.g, 'modular': complex_to_dict(row.modular),
                 'abs_modular': row.abs_modular, 'weak': complex_to_dict(row.weak)}
                for row in rows]}
            _emit(record, config)
